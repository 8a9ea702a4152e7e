// Copyright 2026 The polarlens Authors
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

namespace polarlens {

/// Worker cap: POLARLENS_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index must write only to state it owns;
/// callers combine per-index results afterwards in index order, which keeps
/// results identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace polarlens
