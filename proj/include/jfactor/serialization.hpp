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

#ifndef JFACTOR_SERIALIZATION_HPP_
#define JFACTOR_SERIALIZATION_HPP_

// JSON forms shared by manifests and the command-line tool. Readers throw
// ValidationError on missing or malformed fields.

#include "json.hpp"

#include "jfactor/codec.hpp"
#include "jfactor/dataset.hpp"
#include "jfactor/degradation.hpp"
#include "jfactor/metrics.hpp"

namespace jfactor {

// {"chroma": "420", "upsampling": "nearest", "grayscale": false}
nlohmann::json codec_to_json(const CodecConfig& codec);
CodecConfig codec_from_json(const nlohmann::json& j);

// {"kind": "double", "qf1": 10, "qf2": 90, "shift": [i, j], "codec": {...}}
nlohmann::json recipe_to_json(const DegradationRecipe& recipe);
DegradationRecipe recipe_from_json(const nlohmann::json& j);

std::string_view to_string(SynthMode mode);
SynthMode parse_mode(std::string_view text);

nlohmann::json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j);

// Non-finite values become the strings "inf" / "-inf" / "nan".
nlohmann::json number_to_json(double value);

}  // namespace jfactor

#endif  // JFACTOR_SERIALIZATION_HPP_
