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

#include "bpds/bignum.hpp"

#include <algorithm>

#include "bpds/errors.hpp"

namespace bpds {

Bigint powm(const Bigint& base, const Bigint& exp, const Bigint& m) {
  if (sgn(exp) < 0) fail(Errc::parameter, "powm exponent must be non-negative");
  Bigint out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return out;
}

Bigint invmod(const Bigint& a, const Bigint& m) {
  Bigint out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    fail(Errc::parameter, "no modular inverse");
  }
  return out;
}

Bigint gcd(const Bigint& a, const Bigint& b) {
  Bigint out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

Bigint mod(const Bigint& a, const Bigint& m) {
  Bigint out;
  mpz_mod(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return out;
}

bool is_probable_prime(const Bigint& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

size_t bit_length(const Bigint& n) {
  if (sgn(n) == 0) return 0;
  return mpz_sizeinbase(n.get_mpz_t(), 2);
}

Bytes bigint_to_bytes(const Bigint& n) {
  if (sgn(n) < 0) fail(Errc::parameter, "negative bigint has no canonical bytes");
  if (sgn(n) == 0) return {};
  size_t count = 0;
  Bytes out((mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8);
  mpz_export(out.data(), &count, 1, 1, 1, 0, n.get_mpz_t());
  out.resize(count);
  return out;
}

Bigint bigint_from_bytes(ByteView data) {
  Bigint out;
  if (!data.empty()) {
    mpz_import(out.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
  }
  return out;
}

Bigint bigint_from_digest(const Digest& d) {
  return bigint_from_bytes(ByteView(d.data(), d.size()));
}

void write_bigint_block(ByteWriter& w, const Bigint& n) {
  w.block(bigint_to_bytes(n));
}

Bigint read_bigint_block(ByteReader& r) {
  Bytes raw = r.block();
  if (!raw.empty() && raw.front() == 0) {
    fail(Errc::decode, "integer encoding has a leading zero byte");
  }
  return bigint_from_bytes(raw);
}

uint64_t bigint_to_u64(const Bigint& n) {
  if (sgn(n) < 0 || bit_length(n) > 64) fail(Errc::parameter, "bigint out of u64 range");
  uint64_t lo = mpz_get_ui(n.get_mpz_t());
  if (mpz_sizeinbase(n.get_mpz_t(), 2) > 32 && sizeof(unsigned long) < 8) {
    fail(Errc::parameter, "u64 conversion unsupported on this platform");
  }
  return lo;
}

Bigint uniform_below(Rng& rng, const Bigint& bound) {
  if (sgn(bound) <= 0) fail(Errc::parameter, "uniform_below bound must be positive");
  if (bound == 1) return 0;
  size_t bits = bit_length(bound - 1);
  size_t nbytes = (bits + 7) / 8;
  unsigned top_mask = bits % 8 == 0 ? 0xff : (1u << (bits % 8)) - 1;
  for (;;) {
    Bytes raw = rng.bytes(nbytes);
    raw[0] &= static_cast<uint8_t>(top_mask);
    Bigint v = bigint_from_bytes(raw);
    if (v < bound) return v;
  }
}

Bigint uniform_range(Rng& rng, const Bigint& lo, const Bigint& hi) {
  if (lo > hi) fail(Errc::parameter, "uniform_range lo > hi");
  return lo + uniform_below(rng, hi - lo + 1);
}

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t m) {
  uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Deterministic Miller-Rabin bases for the 64-bit range.
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

uint64_t gcd_u64(uint64_t a, uint64_t b) {
  while (b != 0) {
    uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

uint64_t pollard_rho(uint64_t n) {
  if ((n & 1) == 0) return 2;
  for (uint64_t c = 1;; ++c) {
    uint64_t x = 2, y = 2, d = 1;
    while (d == 1) {
      x = (mulmod_u64(x, x, n) + c) % n;
      y = (mulmod_u64(y, y, n) + c) % n;
      y = (mulmod_u64(y, y, n) + c) % n;
      d = gcd_u64(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_u64_into(uint64_t n, std::vector<uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  uint64_t d = pollard_rho(n);
  factor_u64_into(d, out);
  factor_u64_into(n / d, out);
}

}  // namespace

std::vector<uint64_t> distinct_prime_factors_u64(uint64_t n) {
  std::vector<uint64_t> factors;
  for (uint64_t p = 2; p <= 257 && p * p <= n; p = (p == 2 ? 3 : p + 2)) {
    if (n % p == 0) {
      factors.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) factor_u64_into(n, factors);
  std::sort(factors.begin(), factors.end());
  factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
  return factors;
}

}  // namespace bpds
