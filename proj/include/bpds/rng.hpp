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

#include <cstdint>
#include <span>

#include "bpds/types.hpp"

namespace bpds {

/// Deterministic random source (xoshiro256**, splitmix64-seeded).
/// std::uniform_int_distribution is implementation-defined, so all bounded
/// sampling is done here; identical seeds give identical streams everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  virtual ~Rng() = default;

  virtual uint64_t next();

  /// Uniform in [0, bound). bound must be > 0.
  uint64_t next_below(uint64_t bound);
  /// Uniform in [lo, hi], inclusive.
  uint64_t next_range(uint64_t lo, uint64_t hi);
  /// True with probability p (p in [0,1]).
  bool chance(double p);
  void fill(std::span<uint8_t> out);
  Bytes bytes(size_t n);

  /// Derive an independent child stream; used to give each simulated
  /// component its own seed without coupling draw orders.
  Rng fork();

 private:
  uint64_t s_[4];
};

}  // namespace bpds
