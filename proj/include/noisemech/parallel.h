//
// Copyright 2026 The noisemech Authors
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
//

#ifndef NOISEMECH_PARALLEL_H_
#define NOISEMECH_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace noisemech {

// Worker count: NOISEMECH_THREADS when set to a positive integer, otherwise
// std::thread::hardware_concurrency() (at least 1).
unsigned thread_count();

// Runs body(begin, end, worker) over contiguous chunks of [0, count). Chunk
// boundaries depend only on count and the worker count; callers that need
// thread-count independent results must reduce per index, not per chunk.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t, unsigned)>& body);

}  // namespace noisemech

#endif  // NOISEMECH_PARALLEL_H_
