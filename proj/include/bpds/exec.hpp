// Copyright 2026 The BPDS Authors
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

namespace bpds {

/// Kernel execution policy. Verification kernels have a serial reference
/// implementation and an OpenMP variant; both compute identical results.
enum class Exec {
  automatic,  // parallel when the batch is big enough to pay for itself
  serial,
  parallel,
};

bool openmp_enabled();

/// Resolve `automatic` against the amount of work in the batch.
bool use_parallel(Exec exec, size_t items, size_t cost_hint);

}  // namespace bpds
