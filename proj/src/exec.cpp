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

#include "bpds/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bpds {

bool openmp_enabled() {
#ifdef _OPENMP
  return omp_get_max_threads() > 1;
#else
  return false;
#endif
}

bool use_parallel(Exec exec, size_t items, size_t cost_hint) {
  switch (exec) {
    case Exec::serial:
      return false;
    case Exec::parallel:
#ifdef _OPENMP
      return true;
#else
      return false;
#endif
    case Exec::automatic:
      break;
  }
  if (!openmp_enabled()) return false;
  // Parallelism pays off for wide batches or expensive per-item work
  // (large moduli). cost_hint is the modulus bit length or similar.
  return items * cost_hint >= 16384;
}

}  // namespace bpds
