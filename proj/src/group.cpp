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

#include "bpds/group.hpp"

#include <string>

#include "bpds/errors.hpp"

namespace bpds {

namespace {

// 2048-bit MODP prime from RFC 3526 (group 14). 2 generates only the
// prime-order subgroup of this safe prime; 11 is the smallest primitive
// root, so it is used as the generator for the full group.
constexpr const char* kModp2048Hex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9"
    "DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF";

}  // namespace

void GroupParams::validate() const {
  if (p <= 3) fail(Errc::parameter, "modulus too small");
  if (!is_probable_prime(p)) fail(Errc::parameter, "modulus is not prime");
  if (g <= 1 || g >= p) fail(Errc::parameter, "generator out of range");

  Bigint order = p - 1;
  if (bit_length(p) <= 64) {
    // Small enough to factor the group order outright.
    uint64_t n = bigint_to_u64(order);
    for (uint64_t q : distinct_prime_factors_u64(n)) {
      Bigint exponent = order / Bigint(static_cast<unsigned long>(q));
      if (powm(g, exponent, p) == 1) {
        fail(Errc::parameter, "generator does not span the full group");
      }
    }
    return;
  }

  // Large modulus: require the safe-prime structure so the generator
  // check reduces to two exponentiations.
  Bigint q = order / 2;
  if (!is_probable_prime(q)) fail(Errc::parameter, "modulus is not a safe prime");
  if (powm(g, 2, p) == 1) fail(Errc::parameter, "generator has order 2");
  if (powm(g, q, p) == 1) fail(Errc::parameter, "generator spans only the half-order subgroup");
}

GroupParams test_profile() {
  GroupParams params;
  params.p = Bigint("18446744073709550147");
  params.g = 2;
  return params;
}

GroupParams production_profile() {
  GroupParams params;
  params.p = Bigint(kModp2048Hex, 16);
  params.g = 11;
  return params;
}

GroupParams group_for(Profile profile) {
  switch (profile) {
    case Profile::test:
      return test_profile();
    case Profile::production:
      return production_profile();
  }
  fail(Errc::parameter, "unknown profile");
}

Profile profile_from_name(std::string_view name) {
  if (name == "test") return Profile::test;
  if (name == "production") return Profile::production;
  fail(Errc::parameter, "unknown profile name: " + std::string(name));
}

const char* profile_name(Profile profile) {
  switch (profile) {
    case Profile::test:
      return "test";
    case Profile::production:
      return "production";
  }
  fail(Errc::parameter, "unknown profile");
}

}  // namespace bpds
