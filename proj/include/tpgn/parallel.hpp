// Copyright 2026 The TPGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace tpgn {

// Intra-op worker count. Defaults to TPGN_THREADS when set, otherwise the
// hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs fn(begin, end) over [0, n) in chunks of `grain`. Chunk boundaries do
// not depend on the thread count, so any per-chunk computation gives the same
// bits whether it runs on one thread or many.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace tpgn
