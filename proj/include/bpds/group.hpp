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

#include <string_view>

#include "bpds/bignum.hpp"

namespace bpds {

/// Multiplicative group mod p with generator g. All discrete-log keys,
/// the content-extraction signatures, and the account crypto live here.
struct GroupParams {
  Bigint p;
  Bigint g;

  /// Checks primality of p and, where the factorization of p-1 is
  /// available (p fits 64 bits, or p is a safe prime), that g generates
  /// the full group: g^((p-1)/q) != 1 for each prime factor q of p-1.
  void validate() const;

  bool fits_u64() const { return bit_length(p) <= 64; }
  auto operator<=>(const GroupParams&) const = default;
};

enum class Profile {
  test,        // 64-bit safe prime; fast enough for exhaustive sweeps
  production,  // RFC 3526 group 14 (2048-bit safe prime)
};

/// p = 0xFFFFFFFFFFFFFA43 (safe prime), g = 2 (primitive root).
GroupParams test_profile();

/// The 2048-bit MODP prime of RFC 3526 with g = 11, the smallest
/// primitive root of the full group (the RFC's g = 2 only generates the
/// prime-order subgroup).
GroupParams production_profile();

GroupParams group_for(Profile profile);
Profile profile_from_name(std::string_view name);
const char* profile_name(Profile profile);

}  // namespace bpds
