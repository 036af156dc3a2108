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

#include "jfactor/serialization.hpp"

#include <cmath>
#include <string>

namespace jfactor {
namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) {
    throw ValidationError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) {
    throw ValidationError(std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

json shift_to_json(Shift s) { return json::array({s.rows(), s.cols()}); }

Shift shift_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw ValidationError("shift must be a [rows, cols] pair");
  }
  return Shift(j[0].get<int>(), j[1].get<int>());
}

}  // namespace

json codec_to_json(const CodecConfig& codec) {
  return {{"chroma", to_string(codec.chroma)},
          {"upsampling", to_string(codec.upsampling)},
          {"grayscale", codec.grayscale_mode}};
}

CodecConfig codec_from_json(const json& j) {
  CodecConfig codec;
  codec.chroma = parse_chroma(string_field(j, "chroma"));
  codec.upsampling = parse_upsampling(string_field(j, "upsampling"));
  const json& gray = field(j, "grayscale");
  if (!gray.is_boolean()) throw ValidationError("grayscale must be a boolean");
  codec.grayscale_mode = gray.get<bool>();
  return codec;
}

json recipe_to_json(const DegradationRecipe& recipe) {
  json j;
  if (recipe.kind() == RecipeKind::kSingle) {
    j["kind"] = "single";
    j["qf1"] = recipe.qf1().value();
  } else {
    j["kind"] = "double";
    j["qf1"] = recipe.qf1().value();
    j["qf2"] = recipe.qf2()->value();
    j["shift"] = shift_to_json(*recipe.shift());
  }
  j["codec"] = codec_to_json(recipe.codec());
  return j;
}

DegradationRecipe recipe_from_json(const json& j) {
  const std::string kind = string_field(j, "kind");
  const CodecConfig codec = codec_from_json(field(j, "codec"));
  const QualityFactor qf1(int_field(j, "qf1"));
  if (kind == "single") return DegradationRecipe::single(qf1, codec);
  if (kind == "double") {
    return DegradationRecipe::double_jpeg(qf1, QualityFactor(int_field(j, "qf2")),
                                          shift_from_json(field(j, "shift")),
                                          codec);
  }
  throw ValidationError("recipe kind must be single or double, got '" + kind +
                        "'");
}

std::string_view to_string(SynthMode mode) {
  switch (mode) {
    case SynthMode::kSingle:
      return "single";
    case SynthMode::kDouble:
      return "double";
    case SynthMode::kMixed:
      return "mixed";
  }
  return "single";
}

SynthMode parse_mode(std::string_view text) {
  if (text == "single") return SynthMode::kSingle;
  if (text == "double") return SynthMode::kDouble;
  if (text == "mixed") return SynthMode::kMixed;
  throw ValidationError("mode must be single, double or mixed, got '" +
                        std::string(text) + "'");
}

json synth_config_to_json(const SynthConfig& config) {
  json j;
  j["source_dir"] = config.source_dir.generic_string();
  j["patch_size"] = config.patch_size;
  j["qf_range"] = json::array({config.qf_lo, config.qf_hi});
  j["mode"] = to_string(config.mode);
  if (config.shift_policy.fixed) {
    j["shift_policy"] = "fixed";
    j["fixed_shift"] = shift_to_json(*config.shift_policy.fixed);
  } else {
    j["shift_policy"] = "random_0_7";
  }
  j["seed"] = config.seed;
  j["count"] = config.count;
  j["codec"] = codec_to_json(config.codec);
  return j;
}

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig config;
  config.source_dir = string_field(j, "source_dir");
  config.patch_size = int_field(j, "patch_size");
  const json& range = field(j, "qf_range");
  if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() ||
      !range[1].is_number_integer()) {
    throw ValidationError("qf_range must be a [lo, hi] pair");
  }
  config.qf_lo = range[0].get<int>();
  config.qf_hi = range[1].get<int>();
  config.mode = parse_mode(string_field(j, "mode"));
  const std::string policy = string_field(j, "shift_policy");
  if (policy == "fixed") {
    config.shift_policy = ShiftPolicy::fixed_at(shift_from_json(field(j, "fixed_shift")));
  } else if (policy != "random_0_7") {
    throw ValidationError("shift_policy must be random_0_7 or fixed");
  }
  const json& seed = field(j, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ValidationError("seed must be an integer");
  }
  config.seed = seed.get<std::uint64_t>();
  config.count = int_field(j, "count");
  config.codec = codec_from_json(field(j, "codec"));
  return config;
}

json number_to_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

}  // namespace jfactor
