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

#include "doctest.h"

#include "bpds/bignum.hpp"
#include "bpds/errors.hpp"
#include "support/oracles.hpp"

using namespace bpds;

TEST_CASE("powm matches the machine-width oracle") {
  Rng rng(1001);
  for (int trial = 0; trial < 200; ++trial) {
    uint64_t m = rng.next() | 1;
    if (m < 3) m = 3;
    uint64_t base = rng.next() % m;
    uint64_t exp = rng.next();
    uint64_t expected = oracle::powmod(base, exp, m);
    Bigint got = powm(Bigint(static_cast<unsigned long>(base)),
                      Bigint(static_cast<unsigned long>(exp)),
                      Bigint(static_cast<unsigned long>(m)));
    CHECK(bigint_to_u64(got) == expected);
  }
}

TEST_CASE("powm edge cases") {
  CHECK(powm(5, 0, 7) == 1);
  CHECK(powm(0, 5, 7) == 0);
  CHECK_THROWS_AS(powm(2, -1, 7), Error);
}

TEST_CASE("invmod agrees with the extended-Euclid oracle") {
  Rng rng(1002);
  for (int trial = 0; trial < 200; ++trial) {
    uint64_t m = (rng.next() | 1);
    if (m < 3) m = 3;
    uint64_t a = rng.next() % m;
    uint64_t inv = oracle::invmod(a, m);
    Bigint bm(static_cast<unsigned long>(m));
    Bigint ba(static_cast<unsigned long>(a));
    if (inv == 0) {
      CHECK_THROWS_AS(invmod(ba, bm), Error);
    } else {
      Bigint got = invmod(ba, bm);
      CHECK(bigint_to_u64(got) == inv);
      CHECK(mod(ba * got, bm) == 1);
    }
  }
  CHECK_THROWS_AS(invmod(6, 9), Error);
}

TEST_CASE("mod canonicalizes negatives") {
  CHECK(mod(-5, 3) == 1);
  CHECK(mod(5, 3) == 2);
  CHECK(mod(-3, 3) == 0);
  CHECK(mod(0, 7) == 0);
}

TEST_CASE("byte conversion is canonical") {
  CHECK(bigint_to_bytes(0).empty());
  CHECK(bigint_to_bytes(1) == Bytes{0x01});
  CHECK(bigint_to_bytes(255) == Bytes{0xff});
  CHECK(bigint_to_bytes(256) == Bytes{0x01, 0x00});
  CHECK(bigint_from_bytes(Bytes{}) == 0);
  CHECK(bigint_from_bytes(Bytes{0x00, 0x01}) == 1);

  Rng rng(1003);
  for (int trial = 0; trial < 100; ++trial) {
    Bigint n = uniform_below(rng, Bigint("340282366920938463463374607431768211456"));
    Bytes raw = bigint_to_bytes(n);
    if (!raw.empty()) CHECK(raw[0] != 0);
    CHECK(bigint_from_bytes(raw) == n);
  }
}

TEST_CASE("digest reads as big-endian integer") {
  Digest d{};
  d[31] = 0x2a;
  CHECK(bigint_from_digest(d) == 42);
  d[0] = 0x01;
  Bigint expected = (Bigint(1) << 248) + 42;
  CHECK(bigint_from_digest(d) == expected);
}

TEST_CASE("bigint_to_u64 bounds") {
  CHECK(bigint_to_u64(Bigint("18446744073709550147")) == 18446744073709550147ULL);
  CHECK(bigint_to_u64(0) == 0);
  CHECK_THROWS_AS(bigint_to_u64(Bigint("18446744073709551616")), Error);
}

TEST_CASE("uniform_below stays in range and is deterministic") {
  Bigint bound("18446744073709550147");
  Rng a(1004), b(1004);
  for (int trial = 0; trial < 200; ++trial) {
    Bigint va = uniform_below(a, bound);
    CHECK(va >= 0);
    CHECK(va < bound);
    CHECK(va == uniform_below(b, bound));
  }
  Rng c(1);
  CHECK(uniform_below(c, 1) == 0);
  CHECK_THROWS_AS(uniform_below(c, 0), Error);
}

TEST_CASE("uniform_range inclusive bounds") {
  Rng rng(1005);
  for (int trial = 0; trial < 200; ++trial) {
    Bigint v = uniform_range(rng, 10, 12);
    CHECK(v >= 10);
    CHECK(v <= 12);
  }
  CHECK(uniform_range(rng, 7, 7) == 7);
  CHECK_THROWS_AS(uniform_range(rng, 8, 7), Error);
}

TEST_CASE("distinct prime factors") {
  CHECK(distinct_prime_factors_u64(1).empty());
  CHECK(distinct_prime_factors_u64(2) == std::vector<uint64_t>{2});
  CHECK(distinct_prime_factors_u64(420) == std::vector<uint64_t>{2, 3, 5, 7});
  CHECK(distinct_prime_factors_u64(1ULL << 62) == std::vector<uint64_t>{2});
  CHECK(distinct_prime_factors_u64(18446744073709551615ULL) ==
        std::vector<uint64_t>{3, 5, 17, 257, 641, 65537, 6700417});
  CHECK(distinct_prime_factors_u64(9223372036854775073ULL) ==
        std::vector<uint64_t>{9223372036854775073ULL});
  CHECK(distinct_prime_factors_u64(18446744073709550146ULL) ==
        std::vector<uint64_t>{2, 9223372036854775073ULL});
}

TEST_CASE("primality") {
  CHECK(is_probable_prime(2));
  CHECK(is_probable_prime(Bigint("18446744073709550147")));
  CHECK(is_probable_prime(Bigint("9223372036854775073")));
  CHECK_FALSE(is_probable_prime(1));
  CHECK_FALSE(is_probable_prime(Bigint("18446744073709551615")));
}
