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

#ifndef JFACTOR_PARALLEL_HPP_
#define JFACTOR_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace jfactor {

// Worker budget: JFACTOR_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
int thread_budget();

// Runs task(i) for i in [0, count) on up to `threads` workers (0 means
// thread_budget()). Tasks must write only to their own slot; the first
// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& task,
                  int threads = 0);

}  // namespace jfactor

#endif  // JFACTOR_PARALLEL_HPP_
