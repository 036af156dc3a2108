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

#ifndef JFACTOR_CLI_HPP_
#define JFACTOR_CLI_HPP_

// Batch command-line front end: degrade, estimate-qf, metrics, synth.
// Result rows go to `out` as JSON lines (or a table with --pretty),
// diagnostics to `err`.

#include <ostream>
#include <string>
#include <vector>

namespace jfactor {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace jfactor

#endif  // JFACTOR_CLI_HPP_
