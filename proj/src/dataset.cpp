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

#include "jfactor/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "jfactor/image_io.hpp"
#include "jfactor/parallel.hpp"
#include "jfactor/serialization.hpp"

namespace jfactor {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::string entry_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d.png", index);
  return buf;
}

PixelImage crop(const PixelImage& image, PatchOrigin origin, int w, int h) {
  const int c = image.channel_count();
  PixelImage out(w, h, image.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        out.at(y, x, k) = image.at(origin.row + y, origin.col + x, k);
      }
    }
  }
  return out;
}

struct Source {
  fs::path path;
  PixelImage image;
};

// Smallest source side an entry needs: the patch, plus room for the shift
// crop to leave a non-empty image.
int minimum_side(const SynthConfig& config) {
  const int needed_for_shift = config.mode == SynthMode::kSingle ? 1 : 8;
  return std::max(config.patch_size, needed_for_shift);
}

json entry_to_json(const ManifestEntry& e) {
  char seed[24];
  std::snprintf(seed, sizeof seed, "%016llx",
                static_cast<unsigned long long>(e.seed));
  return {{"index", e.index},
          {"clean_path", e.clean_path},
          {"degraded_path", e.degraded_path},
          {"source_path", e.source_path},
          {"patch_origin", json::array({e.origin.row, e.origin.col})},
          {"patch_size", json::array({e.patch_width, e.patch_height})},
          {"recipe", recipe_to_json(e.recipe)},
          {"seed", seed},
          {"degraded_hash", e.degraded_hash}};
}

ManifestEntry entry_from_json(const json& j) {
  try {
    ManifestEntry e;
    e.index = j.at("index").get<int>();
    e.clean_path = j.at("clean_path").get<std::string>();
    e.degraded_path = j.at("degraded_path").get<std::string>();
    e.source_path = j.at("source_path").get<std::string>();
    e.origin = {j.at("patch_origin").at(0).get<int>(),
                j.at("patch_origin").at(1).get<int>()};
    e.patch_width = j.at("patch_size").at(0).get<int>();
    e.patch_height = j.at("patch_size").at(1).get<int>();
    e.recipe = recipe_from_json(j.at("recipe"));
    e.seed = std::stoull(j.at("seed").get<std::string>(), nullptr, 16);
    e.degraded_hash = j.at("degraded_hash").get<std::string>();
    return e;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed manifest entry: ") + ex.what());
  } catch (const std::logic_error& ex) {
    if (dynamic_cast<const ValidationError*>(&ex)) throw;
    throw ValidationError(std::string("malformed manifest entry: ") + ex.what());
  }
}

}  // namespace

EntryPlan plan_entry(const SynthConfig& config, int index, int source_width,
                     int source_height) {
  EntryPlan plan;
  plan.seed = stable_hash(config.seed, static_cast<std::uint64_t>(index));
  Rng rng(plan.seed);
  bool is_double = config.mode == SynthMode::kDouble;
  if (config.mode == SynthMode::kMixed) is_double = rng.uniform_int(0, 1) == 1;
  const QualityFactor qf1(rng.uniform_int(config.qf_lo, config.qf_hi));
  if (is_double) {
    const QualityFactor qf2(rng.uniform_int(config.qf_lo, config.qf_hi));
    Shift shift(0, 0);
    if (config.shift_policy.fixed) {
      shift = *config.shift_policy.fixed;
    } else {
      const int rows = rng.uniform_int(0, 7);
      shift = Shift(rows, rng.uniform_int(0, 7));
    }
    plan.recipe = DegradationRecipe::double_jpeg(qf1, qf2, shift, config.codec);
  } else {
    plan.recipe = DegradationRecipe::single(qf1, config.codec);
  }
  if (config.patch_size == 0) {
    plan.width = source_width;
    plan.height = source_height;
    return plan;
  }
  if (source_width < config.patch_size || source_height < config.patch_size) {
    throw ValidationError("source is smaller than the patch size");
  }
  plan.origin.row = rng.uniform_int(0, source_height - config.patch_size);
  plan.origin.col = rng.uniform_int(0, source_width - config.patch_size);
  plan.width = config.patch_size;
  plan.height = config.patch_size;
  return plan;
}

std::uint64_t stable_hash(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + kGolden * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw ValidationError("uniform_int needs lo <= hi");
  const std::uint64_t range =
      static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  // Rejection above the largest multiple of range.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
  std::uint64_t x = engine_();
  while (x > limit) x = engine_();
  return static_cast<int>(lo + static_cast<std::int64_t>(x % range));
}

void SynthConfig::validate() const {
  if (count < 1) throw ValidationError("count must be at least 1");
  if (patch_size < 0) throw ValidationError("patch size must be >= 0");
  if (mode != SynthMode::kSingle && patch_size > 0 && patch_size < 8) {
    throw ValidationError("double JPEG patches must be at least 8 pixels");
  }
  if (qf_lo < QualityFactor::kMin || qf_hi > QualityFactor::kMax ||
      qf_lo > qf_hi) {
    throw ValidationError("QF range must satisfy 1 <= lo <= hi <= 100");
  }
}

std::vector<Patch> extract_patches(const PixelImage& image, int patch_size,
                                   Rng& rng, int count) {
  if (patch_size < 1) throw ValidationError("patch size must be positive");
  if (image.width() < patch_size || image.height() < patch_size) {
    throw ValidationError("image " + std::to_string(image.width()) + "x" +
                          std::to_string(image.height()) +
                          " is smaller than the patch size " +
                          std::to_string(patch_size));
  }
  std::vector<Patch> patches;
  patches.reserve(count);
  for (int k = 0; k < count; ++k) {
    PatchOrigin origin;
    origin.row = rng.uniform_int(0, image.height() - patch_size);
    origin.col = rng.uniform_int(0, image.width() - patch_size);
    patches.push_back({origin, crop(image, origin, patch_size, patch_size)});
  }
  return patches;
}

Manifest synthesize_dataset(const SynthConfig& config, const fs::path& out_dir,
                            int threads) {
  config.validate();
  Manifest manifest;
  manifest.toolkit_version = JFACTOR_VERSION;
  manifest.config = config;

  std::vector<Source> sources;
  const int min_side = minimum_side(config);
  for (const fs::path& path : list_images(config.source_dir)) {
    try {
      PixelImage image = read_image(path);
      if (image.width() < min_side || image.height() < min_side) {
        manifest.skipped.push_back(
            {path.filename().generic_string(),
             "smaller than " + std::to_string(min_side) + " pixels"});
        continue;
      }
      sources.push_back({path, std::move(image)});
    } catch (const std::exception& ex) {
      manifest.skipped.push_back({path.filename().generic_string(), ex.what()});
    }
  }
  if (sources.empty()) {
    throw IoError("no usable source images in " + config.source_dir.string());
  }

  fs::create_directories(out_dir / "clean");
  fs::create_directories(out_dir / "degraded");
  const fs::path base = fs::absolute(out_dir).lexically_normal();

  manifest.entries.resize(config.count);
  parallel_for(
      config.count,
      [&](std::size_t k) {
        const int index = static_cast<int>(k);
        const Source& source = sources[k % sources.size()];
        ManifestEntry& e = manifest.entries[k];
        e.index = index;
        const EntryPlan plan = plan_entry(config, index, source.image.width(),
                                          source.image.height());
        e.seed = plan.seed;
        e.recipe = plan.recipe;
        e.origin = plan.origin;
        e.patch_width = plan.width;
        e.patch_height = plan.height;
        const PixelImage patch =
            crop(source.image, plan.origin, plan.width, plan.height);
        const PixelImage degraded = e.recipe.apply(patch);
        e.clean_path = "clean/" + entry_name(index);
        e.degraded_path = "degraded/" + entry_name(index);
        e.source_path =
            fs::absolute(source.path).lexically_normal().lexically_relative(base)
                .generic_string();
        e.degraded_hash = hash_to_hex(content_hash(degraded));
        write_png(out_dir / e.clean_path, e.recipe.reference(patch));
        write_png(out_dir / e.degraded_path, degraded);
      },
      threads);

  manifest.config.source_dir =
      fs::absolute(config.source_dir).lexically_normal().lexically_relative(base);
  write_manifest(manifest, out_dir / kManifestFile);
  return manifest;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  std::ostringstream text;
  json skipped = json::array();
  for (const SkippedSource& s : manifest.skipped) {
    skipped.push_back({{"path", s.path}, {"reason", s.reason}});
  }
  const json header = {{"manifest_version", manifest.manifest_version},
                       {"toolkit_version", manifest.toolkit_version},
                       {"generator", manifest.rng},
                       {"seed_derivation", kSeedDerivation},
                       {"config", synth_config_to_json(manifest.config)},
                       {"skipped", skipped}};
  text << header.dump() << '\n';
  for (const ManifestEntry& e : manifest.entries) {
    text << entry_to_json(e).dump() << '\n';
  }
  std::ofstream out(path, std::ios::binary);
  out << text.str();
  if (!out) throw IoError("cannot write manifest " + path.string());
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("manifest " + path.string() + " is empty");
  }
  Manifest manifest;
  try {
    const json header = json::parse(line);
    manifest.manifest_version = header.at("manifest_version").get<int>();
    if (manifest.manifest_version != kManifestVersion) {
      throw ValidationError("unsupported manifest version " +
                            std::to_string(manifest.manifest_version));
    }
    manifest.toolkit_version = header.at("toolkit_version").get<std::string>();
    manifest.rng = header.at("generator").get<std::string>();
    manifest.config = synth_config_from_json(header.at("config"));
    for (const json& s : header.at("skipped")) {
      manifest.skipped.push_back(
          {s.at("path").get<std::string>(), s.at("reason").get<std::string>()});
    }
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed manifest header: ") +
                          ex.what());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw ValidationError(std::string("malformed manifest line: ") +
                            ex.what());
    }
    manifest.entries.push_back(entry_from_json(j));
  }
  return manifest;
}

PixelImage replay(const ManifestEntry& entry, const fs::path& manifest_dir) {
  const PixelImage source = read_image(manifest_dir / entry.source_path);
  if (entry.origin.row < 0 || entry.origin.col < 0 || entry.patch_width < 1 ||
      entry.patch_height < 1 ||
      entry.origin.row + entry.patch_height > source.height() ||
      entry.origin.col + entry.patch_width > source.width()) {
    throw ValidationError("patch of entry " + std::to_string(entry.index) +
                          " lies outside its source");
  }
  return entry.recipe.apply(
      crop(source, entry.origin, entry.patch_width, entry.patch_height));
}

ReplayReport verify_manifest(const fs::path& manifest_path, int threads) {
  const Manifest manifest = read_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  std::vector<char> ok(manifest.entries.size(), 0);
  parallel_for(
      manifest.entries.size(),
      [&](std::size_t k) {
        const ManifestEntry& e = manifest.entries[k];
        const PixelImage replayed = replay(e, dir);
        const PixelImage stored = read_image(dir / e.degraded_path);
        ok[k] = hash_to_hex(content_hash(replayed)) == e.degraded_hash &&
                replayed == stored;
      },
      threads);
  ReplayReport report;
  for (std::size_t k = 0; k < ok.size(); ++k) {
    ++report.checked;
    if (ok[k]) {
      ++report.matched;
    } else {
      report.mismatched.push_back(manifest.entries[k].index);
    }
  }
  return report;
}

}  // namespace jfactor
