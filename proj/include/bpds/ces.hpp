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

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "bpds/exec.hpp"
#include "bpds/group.hpp"
#include "bpds/rng.hpp"

namespace bpds::ces {

/// Documents carry exactly seven submessages, indexed 1..7.
inline constexpr int kParts = 7;

/// Submessage bytes in document order; index i lives at parts[i-1].
using PartBytes = std::array<Bytes, kParts>;

/// Submessages retained after extraction, keyed by their index.
using PartMap = std::map<int, Bytes>;

/// 80-bit per-document signature tag.
struct CesTag {
  std::array<uint8_t, 10> bytes{};

  static CesTag random(Rng& rng);
  auto operator<=>(const CesTag&) const = default;
};

/// Content extraction access structure: the indices every extraction must
/// retain. Non-empty, strictly ascending, all in [1,7].
class Ceas {
 public:
  explicit Ceas(std::vector<int> indices);

  const std::vector<int>& indices() const { return indices_; }
  bool contains(int i) const;
  /// True when every mandatory index is present in `set`.
  bool subset_of(const std::vector<int>& set) const;
  /// Ascending decimal indices joined by commas, e.g. "2,3,5". This exact
  /// text feeds the submessage hash.
  std::string joined() const;

  bool operator==(const Ceas&) const = default;

 private:
  std::vector<int> indices_;
};

struct CesPublicKey {
  GroupParams params;
  Bigint v;  // g^a mod p
};

struct CesKeyPair {
  GroupParams params;
  Bigint a;  // private exponent, 1 <= a <= p-2
  Bigint v;  // g^a mod p

  CesPublicKey public_key() const { return {params, v}; }
};

/// Signature over all seven submessages: delta_i = (h_i - a*r) * k^-1
/// mod (p-1) with r = g^k mod p. r is carried explicitly; verification
/// needs it.
struct FullSignature {
  Ceas ceas;
  CesTag tag;
  Bigint r;
  std::array<Bigint, kParts> deltas;  // delta_i at deltas[i-1]

  Bytes serialize() const;
  static FullSignature deserialize(ByteView data);
  std::string hex() const;
};

/// Signature over an extracted subset CI of the submessages. Carries the
/// CEAS, the extraction set, the tag, r, and the deltas for CI only.
struct ExtractedSignature {
  Ceas ceas;
  std::vector<int> ci;         // ascending
  CesTag tag;
  Bigint r;
  std::vector<Bigint> deltas;  // aligned with ci

  Bytes serialize() const;
  static ExtractedSignature deserialize(ByteView data);
  std::string hex() const;
};

/// Draws a uniformly from [1, p-2] and returns (a, v = g^a mod p).
CesKeyPair keygen(const GroupParams& params, Rng& rng);

/// Fixture entry point: builds the key pair for a caller-chosen exponent.
/// Rejects a outside [1, p-2].
CesKeyPair keygen_with_exponent(const GroupParams& params, const Bigint& a);

/// h_i = H(M_i || CEAS || T || i) reduced into Z_p. The canonical byte
/// encoding is length-prefixed m_i, the CEAS index text, the raw 10-byte
/// tag, and i as one byte.
Bigint hash_submessage(ByteView m_i, const Ceas& ceas, const CesTag& tag, int i,
                       const Bigint& p);

FullSignature sign(const CesKeyPair& sk, const PartBytes& m, const Ceas& ceas,
                   const CesTag& tag, Rng& rng);

/// Signs with a fixed nonce; throws Errc::parameter when gcd(k, p-1) != 1.
FullSignature sign_with_nonce(const CesKeyPair& sk, const PartBytes& m, const Ceas& ceas,
                              const CesTag& tag, const Bigint& k);

/// True iff every recomputed h_i satisfies v^r * r^delta_i == g^h_i (mod p).
/// Forgery and corruption yield false, never an exception.
bool verify_full(const CesPublicKey& pk, const PartBytes& m, const FullSignature& sig,
                 Exec exec = Exec::automatic);

/// Keeps the submessages in `chosen` and reassembles the signature material
/// for them. `chosen` must include every CEAS index and stay within [1,7];
/// the input signature must verify.
std::pair<PartMap, ExtractedSignature> extract(const CesPublicKey& pk, const PartBytes& m,
                                               const FullSignature& sig,
                                               const std::vector<int>& chosen);

/// True iff CEAS is contained in CI, the retained submessages match CI
/// exactly, and every congruence holds.
bool verify_extracted(const CesPublicKey& pk, const PartMap& m_prime,
                      const ExtractedSignature& esig, Exec exec = Exec::automatic);

namespace detail {

/// delta = (h - a*r) * k_inv mod (p-1), normalized into [0, p-2].
Bigint delta_for(const Bigint& h, const Bigint& a, const Bigint& r, const Bigint& k_inv,
                 const Bigint& p);

/// One verification congruence: v^r * r^delta == g^h (mod p).
/// v_pow_r is the precomputed v^r mod p shared across indices.
bool check_congruence(const GroupParams& params, const Bigint& v_pow_r, const Bigint& r,
                      const Bigint& delta, const Bigint& h);

struct CongruenceItem {
  Bigint h;
  Bigint delta;
};

/// Batch congruence kernel; OpenMP variant used for large groups/batches,
/// serial loop kept as the reference. Results are identical.
bool check_congruences(const GroupParams& params, const Bigint& v, const Bigint& r,
                       const std::vector<CongruenceItem>& items, Exec exec);

}  // namespace detail

}  // namespace bpds::ces
