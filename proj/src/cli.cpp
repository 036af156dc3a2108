// Copyright (c) the jfactor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jfactor/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "jfactor/codec.hpp"
#include "jfactor/dataset.hpp"
#include "jfactor/degradation.hpp"
#include "jfactor/image_io.hpp"
#include "jfactor/metrics.hpp"
#include "jfactor/parallel.hpp"
#include "jfactor/qf_estimation.hpp"
#include "jfactor/serialization.hpp"

namespace jfactor {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Collects result rows; JSON lines by default, one aligned table with
// --pretty.
class Emitter {
 public:
  Emitter(std::ostream& out, bool pretty) : out_(out), pretty_(pretty) {}

  void row(const json& r) {
    if (pretty_) {
      rows_.push_back(r);
    } else {
      out_ << r.dump() << '\n';
    }
  }

  void flush() {
    if (!pretty_ || rows_.empty()) return;
    std::vector<std::string> columns;
    for (const json& r : rows_) {
      for (const auto& [key, value] : r.items()) {
        if (std::find(columns.begin(), columns.end(), key) == columns.end()) {
          columns.push_back(key);
        }
      }
    }
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
    for (const json& r : rows_) {
      std::vector<std::string> line;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        std::string text;
        if (r.contains(columns[c])) {
          const json& v = r.at(columns[c]);
          text = v.is_string() ? v.get<std::string>() : v.dump();
        }
        width[c] = std::max(width[c], text.size());
        line.push_back(std::move(text));
      }
      cells.push_back(std::move(line));
    }
    auto print = [&](const std::vector<std::string>& line) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        out_ << line[c];
        if (c + 1 < line.size()) out_ << std::string(width[c] - line[c].size() + 2, ' ');
      }
      out_ << '\n';
    };
    print(columns);
    for (const auto& line : cells) print(line);
    rows_.clear();
  }

 private:
  std::ostream& out_;
  bool pretty_;
  std::vector<json> rows_;
};

int exit_code_for(const std::exception& ex) {
  if (dynamic_cast<const ValidationError*>(&ex)) return kExitValidation;
  if (dynamic_cast<const IoError*>(&ex)) return kExitIo;
  if (dynamic_cast<const fs::filesystem_error*>(&ex)) return kExitIo;
  return kExitValidation;
}

json error_record(const std::string& message, int code) {
  return {{"error", message}, {"exit_code", code}};
}

Shift parse_shift(const std::string& text) {
  int rows = 0;
  int cols = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> rows >> comma >> cols) || comma != ',' || !in.eof()) {
    throw ValidationError("shift must look like i,j, got '" + text + "'");
  }
  return Shift(rows, cols);
}

std::pair<int, int> parse_range(const std::string& text) {
  int lo = 0;
  int hi = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> lo >> comma >> hi) || comma != ',' || !in.eof()) {
    throw ValidationError("range must look like lo,hi, got '" + text + "'");
  }
  return {lo, hi};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hash_to_hex(h);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CodecConfig codec_from_flags(const std::string& chroma,
                             const std::string& upsampling, bool gray) {
  CodecConfig codec;
  codec.chroma = parse_chroma(chroma);
  codec.upsampling = parse_upsampling(upsampling);
  codec.grayscale_mode = gray;
  return codec;
}

struct DegradeArgs {
  std::string input;
  std::string output;
  int qf1 = 0;
  std::optional<int> qf2;
  std::string shift;
  std::string chroma = "420";
  std::string upsampling = "nearest";
  bool gray = false;
};

std::string default_output(const DegradeArgs& a) {
  const fs::path in(a.input);
  std::string name = in.stem().string() + "_q" + std::to_string(a.qf1);
  if (a.qf2) {
    name += "_" + std::to_string(*a.qf2);
    if (!a.shift.empty()) {
      const Shift s = parse_shift(a.shift);
      name += "_s" + std::to_string(s.rows()) + std::to_string(s.cols());
    }
  }
  return (in.parent_path() / (name + ".png")).string();
}

int cmd_degrade(const DegradeArgs& a, Emitter& emit) {
  const CodecConfig codec = codec_from_flags(a.chroma, a.upsampling, a.gray);
  if (!a.shift.empty() && !a.qf2) {
    throw ValidationError("--shift needs --qf2");
  }
  const QualityFactor qf1(a.qf1);
  const DegradationRecipe recipe =
      a.qf2 ? DegradationRecipe::double_jpeg(
                  qf1, QualityFactor(*a.qf2),
                  a.shift.empty() ? Shift(0, 0) : parse_shift(a.shift), codec)
            : DegradationRecipe::single(qf1, codec);
  const std::string output = a.output.empty() ? default_output(a) : a.output;
  const PixelImage degraded = recipe.apply(read_image(a.input));
  write_png(output, degraded);
  json r = {{"input", a.input},
            {"output", output},
            {"width", degraded.width()},
            {"height", degraded.height()},
            {"channels", degraded.channel_count()},
            {"recipe", recipe_to_json(recipe)}};
  if (recipe.kind() == RecipeKind::kDouble) {
    r["regime"] = to_string(classify_double_regime(
        recipe.shift()->aligned(), recipe.qf1(), *recipe.qf2()));
  }
  emit.row(r);
  return kExitOk;
}

struct EstimateArgs {
  std::string input;
  std::string mode = "single";
  double threshold = 30.0;
  int stride = 1;
  std::string region = "unclipped";
  double min_contrast = 1.5;
  int qf1_margin = 10;
  std::string dump_curves;
};

std::vector<fs::path> inputs_of(const fs::path& input) {
  if (fs::is_directory(input)) return list_images(input);
  return {input};
}

int cmd_estimate(const EstimateArgs& a, Emitter& emit) {
  if (a.mode != "single" && a.mode != "dominant") {
    throw ValidationError("--mode must be single or dominant");
  }
  if (!std::isfinite(a.threshold) || a.threshold < 0) {
    throw ValidationError("--threshold must be a finite value >= 0");
  }
  EstimationOptions options;
  options.threshold = a.threshold;
  options.stride = a.stride;
  options.min_contrast = a.min_contrast;
  options.qf1_margin = a.qf1_margin;
  options.region =
      a.region == "all" ? CurveRegion::kAllBlocks : CurveRegion::kUnclipped;
  const bool batch = fs::is_directory(a.input);
  const std::vector<fs::path> paths = inputs_of(a.input);
  if (batch && !a.dump_curves.empty()) fs::create_directories(a.dump_curves);
  for (const fs::path& path : paths) {
    const PixelImage image = read_image(path);
    QfEstimate est;
    if (a.mode == "single") {
      MseCurve curve = recompression_mse_curve(image, Shift(0, 0), a.stride,
                                               options.region);
      est.qf2_est = find_global_minimum(curve).qf;
      est.diagnostics.push_back(
          {curve.shift, find_global_minimum(curve), find_first_minimum(curve)});
      est.curves.push_back(curve);
      est.threshold_used = a.threshold;
    } else {
      est = estimate_dominant_qf(image, options);
    }
    if (!a.dump_curves.empty()) {
      const fs::path dump = batch ? fs::path(a.dump_curves) /
                                        (path.stem().string() + ".jsonl")
                                  : fs::path(a.dump_curves);
      std::ofstream out(dump, std::ios::binary);
      write_curve_dump(out, est);
      if (!out) throw IoError("cannot write " + dump.string());
    }
    json r = {{"path", path.generic_string()}, {"mode", a.mode}};
    if (a.mode == "single") {
      r["qf"] = est.qf2_est.value();
    } else {
      r["qf1"] = est.qf1_est ? json(est.qf1_est->value()) : json();
      r["qf2"] = est.qf2_est.value();
      r["regime"] = to_string(est.regime);
      r["threshold"] = est.threshold_used;
      r["qf1_contrast"] = est.qf1_contrast;
    }
    emit.row(r);
  }
  return kExitOk;
}

struct MetricsArgs {
  std::string reference;
  std::string test;
  bool luma = false;
};

json report_json(const MetricReport& m) {
  return {{"psnr", number_to_json(m.psnr)},
          {"ssim", number_to_json(m.ssim)},
          {"psnr_b", number_to_json(m.psnr_b)},
          {"mse", number_to_json(m.mse)}};
}

int cmd_metrics(const MetricsArgs& a, Emitter& emit, std::ostream& err) {
  const Comparison cmp = a.luma ? Comparison::kLuma : Comparison::kNative;
  std::vector<std::pair<fs::path, fs::path>> pairs;
  const bool ref_dir = fs::is_directory(a.reference);
  const bool test_dir = fs::is_directory(a.test);
  if (ref_dir != test_dir) {
    throw ValidationError("reference and test must both be files or both be directories");
  }
  if (ref_dir) {
    for (const fs::path& ref : list_images(a.reference)) {
      pairs.emplace_back(ref, fs::path(a.test) / ref.filename());
    }
    if (pairs.empty()) throw IoError("no images in " + a.reference);
  } else {
    pairs.emplace_back(a.reference, a.test);
  }

  struct Outcome {
    std::optional<MetricReport> report;
    std::string error;
    int code = kExitOk;
  };
  std::vector<Outcome> outcomes(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    try {
      outcomes[k].report = evaluate(read_image(pairs[k].first),
                                    read_image(pairs[k].second), cmp);
    } catch (const std::exception& ex) {
      outcomes[k].error = ex.what();
      outcomes[k].code = exit_code_for(ex);
    }
  });

  int code = kExitOk;
  MetricReport sum{0, 0, 0, 0};
  int ok = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    json r = {{"reference", pairs[k].first.generic_string()},
              {"test", pairs[k].second.generic_string()}};
    if (outcomes[k].report) {
      const MetricReport& m = *outcomes[k].report;
      r.update(report_json(m));
      sum.psnr += m.psnr;
      sum.ssim += m.ssim;
      sum.psnr_b += m.psnr_b;
      sum.mse += m.mse;
      ++ok;
    } else {
      r.update(error_record(outcomes[k].error, outcomes[k].code));
      err << "jfactor: " << pairs[k].first.generic_string() << ": "
          << outcomes[k].error << '\n';
      code = std::max(code, outcomes[k].code);
    }
    emit.row(r);
  }
  if (ok > 0) {
    const double n = ok;
    json r = {{"mean", true}, {"pairs", ok}};
    r.update(report_json(
        {sum.psnr / n, sum.ssim / n, sum.psnr_b / n, sum.mse / n}));
    emit.row(r);
  }
  return code;
}

struct SynthArgs {
  std::string source_dir;
  std::string out_dir;
  int patch_size = 128;
  std::string qf_range = "10,95";
  std::string mode = "single";
  std::string shift_policy = "random_0_7";
  std::string fixed_shift;
  std::uint64_t seed = 0;
  int count = 0;
  std::string chroma = "420";
  std::string upsampling = "nearest";
  bool gray = false;
  bool verify = false;
};

int cmd_synth(const SynthArgs& a, Emitter& emit) {
  SynthConfig config;
  config.source_dir = a.source_dir;
  config.patch_size = a.patch_size;
  std::tie(config.qf_lo, config.qf_hi) = parse_range(a.qf_range);
  config.mode = parse_mode(a.mode);
  if (a.shift_policy == "fixed") {
    if (a.fixed_shift.empty()) {
      throw ValidationError("--shift-policy fixed needs --fixed-shift i,j");
    }
    config.shift_policy = ShiftPolicy::fixed_at(parse_shift(a.fixed_shift));
  } else if (a.shift_policy != "random_0_7") {
    throw ValidationError("--shift-policy must be random_0_7 or fixed");
  } else if (!a.fixed_shift.empty()) {
    throw ValidationError("--fixed-shift needs --shift-policy fixed");
  }
  config.seed = a.seed;
  config.count = a.count;
  config.codec = codec_from_flags(a.chroma, a.upsampling, a.gray);
  config.validate();

  const Manifest manifest = synthesize_dataset(config, a.out_dir);
  const fs::path manifest_path = fs::path(a.out_dir) / kManifestFile;
  json r = {{"manifest", manifest_path.generic_string()},
            {"entries", manifest.entries.size()},
            {"skipped", manifest.skipped.size()},
            {"manifest_hash", fnv1a_hex(read_file(manifest_path))}};
  int code = kExitOk;
  if (a.verify) {
    const ReplayReport report = verify_manifest(manifest_path);
    r["replay_matched"] = report.matched;
    r["replay_checked"] = report.checked;
    if (report.matched != report.checked) code = kExitValidation;
  }
  emit.row(r);
  return code;
}

void add_codec_flags(CLI::App* cmd, std::string& chroma, std::string& upsampling,
                     bool& gray) {
  cmd->add_option("--chroma", chroma, "Chroma subsampling: 420 or 444")
      ->check(CLI::IsMember({"420", "444"}))
      ->capture_default_str();
  cmd->add_option("--upsampling", upsampling,
                  "4:2:0 chroma upsampling: nearest or triangle")
      ->check(CLI::IsMember({"nearest", "triangle"}))
      ->capture_default_str();
  cmd->add_flag("--gray", gray, "Compress the luma channel only");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app("JPEG degradation, quality-factor estimation and metrics",
               "jfactor");
  app.set_version_flag("--version", JFACTOR_VERSION);
  app.set_config("--config", "",
                 "Read options from a TOML file; subcommand options go under "
                 "a [subcommand] table");
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  app.add_flag("--pretty", pretty, "Render results as an aligned table");

  DegradeArgs degrade;
  CLI::App* c_degrade =
      app.add_subcommand("degrade", "Apply single or double JPEG compression");
  c_degrade->add_option("input", degrade.input, "Input image")->required();
  c_degrade->add_option("-o,--output", degrade.output,
                        "Output PNG (default: <stem>_q<qf1>[...].png beside "
                        "the input)");
  c_degrade->add_option("--qf1", degrade.qf1, "First quality factor")
      ->required();
  c_degrade->add_option("--qf2", degrade.qf2, "Second quality factor");
  c_degrade->add_option("--shift", degrade.shift,
                        "Rows,cols removed between compressions, each 0-7");
  add_codec_flags(c_degrade, degrade.chroma, degrade.upsampling, degrade.gray);

  EstimateArgs estimate;
  CLI::App* c_estimate = app.add_subcommand(
      "estimate-qf", "Estimate the quality factor of decoded JPEG pixels");
  c_estimate->add_option("input", estimate.input, "Image or directory")
      ->required();
  c_estimate->add_option("--mode", estimate.mode, "single or dominant")
      ->check(CLI::IsMember({"single", "dominant"}))
      ->capture_default_str();
  c_estimate->add_option("--threshold", estimate.threshold,
                         "MSE bound for the qf1 minimum (0-255 squared scale)")
      ->capture_default_str();
  c_estimate->add_option("--stride", estimate.stride,
                         "Evaluate every stride-th candidate QF")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_estimate->add_option("--region", estimate.region,
                         "Blocks entering the curves: unclipped (skip blocks "
                         "with 0/255 samples) or all")
      ->check(CLI::IsMember({"unclipped", "all"}))
      ->capture_default_str();
  c_estimate->add_option("--min-contrast", estimate.min_contrast,
                         "Cross-shift contrast needed to report qf1")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_estimate->add_option("--qf1-margin", estimate.qf1_margin,
                         "qf1 candidates stay at or below qf2 - margin")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_estimate->add_option("--dump-curves", estimate.dump_curves,
                         "Write per-shift MSE curves as JSON lines (a "
                         "directory for directory input)");

  MetricsArgs metrics;
  CLI::App* c_metrics =
      app.add_subcommand("metrics", "PSNR, SSIM and PSNR-B of image pairs");
  c_metrics->add_option("reference", metrics.reference,
                        "Reference image or directory")
      ->required();
  c_metrics->add_option("test", metrics.test, "Test image or directory")
      ->required();
  c_metrics->add_flag("--luma", metrics.luma, "Compare BT.601 luma only");

  SynthArgs synth;
  CLI::App* c_synth =
      app.add_subcommand("synth", "Synthesize a clean/degraded dataset");
  c_synth->add_option("--source-dir", synth.source_dir, "Source images")
      ->required();
  c_synth->add_option("--out", synth.out_dir, "Output directory")->required();
  c_synth->add_option("--patch-size", synth.patch_size,
                      "Patch side in pixels; 0 keeps whole images")
      ->capture_default_str();
  c_synth->add_option("--qf-range", synth.qf_range, "Inclusive lo,hi")
      ->capture_default_str();
  c_synth->add_option("--mode", synth.mode, "single, double or mixed")
      ->check(CLI::IsMember({"single", "double", "mixed"}))
      ->capture_default_str();
  c_synth->add_option("--shift-policy", synth.shift_policy,
                      "random_0_7 or fixed")
      ->check(CLI::IsMember({"random_0_7", "fixed"}))
      ->capture_default_str();
  c_synth->add_option("--fixed-shift", synth.fixed_shift,
                      "Shift i,j for --shift-policy fixed");
  c_synth->add_option("--seed", synth.seed, "Global seed")->capture_default_str();
  c_synth->add_option("--count", synth.count, "Number of entries")->required();
  add_codec_flags(c_synth, synth.chroma, synth.upsampling, synth.gray);
  c_synth->add_flag("--verify", synth.verify,
                    "Replay every entry and compare with the stored files");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << JFACTOR_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "jfactor: " << e.what() << '\n';
    CLI::App* shown = &app;
    for (CLI::App* sub : app.get_subcommands()) shown = sub;
    err << shown->help();
    return kExitValidation;
  }

  Emitter emit(out, pretty);
  int code = kExitOk;
  try {
    if (c_degrade->parsed()) code = cmd_degrade(degrade, emit);
    if (c_estimate->parsed()) code = cmd_estimate(estimate, emit);
    if (c_metrics->parsed()) code = cmd_metrics(metrics, emit, err);
    if (c_synth->parsed()) code = cmd_synth(synth, emit);
  } catch (const std::exception& ex) {
    code = exit_code_for(ex);
    emit.row(error_record(ex.what(), code));
    err << "jfactor: error: " << ex.what() << '\n';
  }
  emit.flush();
  return code;
}

}  // namespace jfactor
