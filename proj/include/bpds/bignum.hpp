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

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "bpds/codec.hpp"
#include "bpds/hash.hpp"
#include "bpds/rng.hpp"
#include "bpds/types.hpp"

namespace bpds {

using Bigint = mpz_class;

/// base^exp mod m. exp must be non-negative.
Bigint powm(const Bigint& base, const Bigint& exp, const Bigint& m);

/// Multiplicative inverse of a mod m; throws when gcd(a, m) != 1.
Bigint invmod(const Bigint& a, const Bigint& m);

Bigint gcd(const Bigint& a, const Bigint& b);

/// Canonical residue of a in [0, m).
Bigint mod(const Bigint& a, const Bigint& m);

bool is_probable_prime(const Bigint& n);

size_t bit_length(const Bigint& n);

/// Big-endian magnitude; empty for zero. Canonical (no leading zero byte).
Bytes bigint_to_bytes(const Bigint& n);
Bigint bigint_from_bytes(ByteView data);

/// 32-byte digest read as a big-endian integer.
Bigint bigint_from_digest(const Digest& d);

/// Length-prefixed canonical magnitude. Reading rejects a leading zero byte so
/// every integer has exactly one encoding.
void write_bigint_block(ByteWriter& w, const Bigint& n);
Bigint read_bigint_block(ByteReader& r);

uint64_t bigint_to_u64(const Bigint& n);

/// Uniform in [0, bound) by masked rejection sampling; deterministic in the
/// rng stream. bound must be positive.
Bigint uniform_below(Rng& rng, const Bigint& bound);

/// Uniform in [lo, hi], inclusive.
Bigint uniform_range(Rng& rng, const Bigint& lo, const Bigint& hi);

/// Prime factorization of a 64-bit value (trial division + Pollard rho).
/// Returns the distinct prime factors, ascending.
std::vector<uint64_t> distinct_prime_factors_u64(uint64_t n);

}  // namespace bpds
