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

#include "bpds/ces.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "bpds/codec.hpp"
#include "bpds/errors.hpp"
#include "bpds/hash.hpp"

namespace bpds::ces {

namespace {

void require_group_shape(const GroupParams& params) {
  if (params.p < 5 || mpz_even_p(params.p.get_mpz_t()))
    fail(Errc::parameter, "group modulus must be an odd prime > 3");
  if (params.g <= 1 || params.g >= params.p) fail(Errc::parameter, "generator out of range");
}

void write_index_set(ByteWriter& w, const std::vector<int>& indices) {
  w.u8(static_cast<uint8_t>(indices.size()));
  for (int i : indices) w.u8(static_cast<uint8_t>(i));
}

std::vector<int> read_index_set(ByteReader& r) {
  size_t count = r.u8();
  if (count == 0 || count > static_cast<size_t>(kParts))
    fail(Errc::decode, "index set size out of range");
  std::vector<int> indices;
  indices.reserve(count);
  for (size_t j = 0; j < count; ++j) {
    int i = r.u8();
    if (i < 1 || i > kParts) fail(Errc::decode, "index out of range");
    if (!indices.empty() && i <= indices.back()) fail(Errc::decode, "indices not ascending");
    indices.push_back(i);
  }
  return indices;
}

void write_bigint(ByteWriter& w, const Bigint& n) { write_bigint_block(w, n); }

Bigint read_bigint(ByteReader& r) { return read_bigint_block(r); }

bool ascending_in_range(const std::vector<int>& indices) {
  if (indices.empty()) return false;
  for (size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 1 || indices[j] > kParts) return false;
    if (j > 0 && indices[j] <= indices[j - 1]) return false;
  }
  return true;
}

}  // namespace

CesTag CesTag::random(Rng& rng) {
  CesTag tag;
  rng.fill(tag.bytes);
  return tag;
}

Ceas::Ceas(std::vector<int> indices) : indices_(std::move(indices)) {
  if (indices_.empty()) fail(Errc::parameter, "CEAS must be non-empty");
  for (size_t j = 0; j < indices_.size(); ++j) {
    if (indices_[j] < 1 || indices_[j] > kParts)
      fail(Errc::parameter, "CEAS index out of range");
    if (j > 0 && indices_[j] <= indices_[j - 1])
      fail(Errc::parameter, "CEAS indices must be strictly ascending");
  }
}

bool Ceas::contains(int i) const {
  return std::find(indices_.begin(), indices_.end(), i) != indices_.end();
}

bool Ceas::subset_of(const std::vector<int>& set) const {
  for (int i : indices_) {
    if (std::find(set.begin(), set.end(), i) == set.end()) return false;
  }
  return true;
}

std::string Ceas::joined() const {
  std::string out;
  for (size_t j = 0; j < indices_.size(); ++j) {
    if (j > 0) out += ',';
    out += std::to_string(indices_[j]);
  }
  return out;
}

Bytes FullSignature::serialize() const {
  ByteWriter w;
  write_index_set(w, ceas.indices());
  w.raw(ByteView(tag.bytes.data(), tag.bytes.size()));
  write_bigint(w, r);
  for (const Bigint& d : deltas) write_bigint(w, d);
  return w.take();
}

FullSignature FullSignature::deserialize(ByteView data) {
  ByteReader rd(data);
  std::vector<int> ceas_indices = read_index_set(rd);
  CesTag tag;
  Bytes tag_bytes = rd.raw(tag.bytes.size());
  std::copy(tag_bytes.begin(), tag_bytes.end(), tag.bytes.begin());
  Bigint r = read_bigint(rd);
  std::array<Bigint, kParts> deltas;
  for (int i = 0; i < kParts; ++i) deltas[i] = read_bigint(rd);
  rd.expect_done();
  return FullSignature{Ceas(std::move(ceas_indices)), tag, std::move(r), std::move(deltas)};
}

std::string FullSignature::hex() const { return to_hex(serialize()); }

Bytes ExtractedSignature::serialize() const {
  ByteWriter w;
  write_index_set(w, ceas.indices());
  write_index_set(w, ci);
  w.raw(ByteView(tag.bytes.data(), tag.bytes.size()));
  write_bigint(w, r);
  for (const Bigint& d : deltas) write_bigint(w, d);
  return w.take();
}

ExtractedSignature ExtractedSignature::deserialize(ByteView data) {
  ByteReader rd(data);
  std::vector<int> ceas_indices = read_index_set(rd);
  std::vector<int> ci = read_index_set(rd);
  CesTag tag;
  Bytes tag_bytes = rd.raw(tag.bytes.size());
  std::copy(tag_bytes.begin(), tag_bytes.end(), tag.bytes.begin());
  Bigint r = read_bigint(rd);
  std::vector<Bigint> deltas;
  deltas.reserve(ci.size());
  for (size_t j = 0; j < ci.size(); ++j) deltas.push_back(read_bigint(rd));
  rd.expect_done();
  return ExtractedSignature{Ceas(std::move(ceas_indices)), std::move(ci), tag, std::move(r),
                            std::move(deltas)};
}

std::string ExtractedSignature::hex() const { return to_hex(serialize()); }

CesKeyPair keygen(const GroupParams& params, Rng& rng) {
  require_group_shape(params);
  Bigint a = uniform_range(rng, 1, params.p - 2);
  return CesKeyPair{params, a, powm(params.g, a, params.p)};
}

CesKeyPair keygen_with_exponent(const GroupParams& params, const Bigint& a) {
  require_group_shape(params);
  if (a < 1 || a > params.p - 2) fail(Errc::parameter, "private exponent out of range");
  return CesKeyPair{params, a, powm(params.g, a, params.p)};
}

Bigint hash_submessage(ByteView m_i, const Ceas& ceas, const CesTag& tag, int i,
                       const Bigint& p) {
  if (i < 1 || i > kParts) fail(Errc::index, "submessage index out of range");
  ByteWriter w;
  w.block(m_i);
  std::string joined = ceas.joined();
  w.raw(ByteView(reinterpret_cast<const uint8_t*>(joined.data()), joined.size()));
  w.raw(ByteView(tag.bytes.data(), tag.bytes.size()));
  w.u8(static_cast<uint8_t>(i));
  return mod(bigint_from_digest(sha256(w.bytes())), p);
}

FullSignature sign(const CesKeyPair& sk, const PartBytes& m, const Ceas& ceas,
                   const CesTag& tag, Rng& rng) {
  const Bigint order = sk.params.p - 1;
  Bigint k;
  do {
    k = uniform_range(rng, 1, sk.params.p - 2);
  } while (gcd(k, order) != 1);
  return sign_with_nonce(sk, m, ceas, tag, k);
}

FullSignature sign_with_nonce(const CesKeyPair& sk, const PartBytes& m, const Ceas& ceas,
                              const CesTag& tag, const Bigint& k) {
  require_group_shape(sk.params);
  const Bigint& p = sk.params.p;
  const Bigint order = p - 1;
  if (k < 1 || k > p - 2) fail(Errc::parameter, "nonce out of range");
  if (gcd(k, order) != 1) fail(Errc::parameter, "nonce is not invertible mod p-1");
  Bigint r = powm(sk.params.g, k, p);
  Bigint k_inv = invmod(k, order);
  std::array<Bigint, kParts> deltas;
  for (int i = 1; i <= kParts; ++i) {
    Bigint h = hash_submessage(ByteView(m[i - 1]), ceas, tag, i, p);
    deltas[i - 1] = detail::delta_for(h, sk.a, r, k_inv, p);
  }
  return FullSignature{ceas, tag, std::move(r), std::move(deltas)};
}

bool verify_full(const CesPublicKey& pk, const PartBytes& m, const FullSignature& sig,
                 Exec exec) {
  const Bigint& p = pk.params.p;
  const Bigint order = p - 1;
  if (sig.r < 1 || sig.r >= p) return false;
  std::vector<detail::CongruenceItem> items;
  items.reserve(kParts);
  for (int i = 1; i <= kParts; ++i) {
    const Bigint& delta = sig.deltas[i - 1];
    if (delta < 0 || delta >= order) return false;
    items.push_back({hash_submessage(ByteView(m[i - 1]), sig.ceas, sig.tag, i, p), delta});
  }
  return detail::check_congruences(pk.params, pk.v, sig.r, items, exec);
}

std::pair<PartMap, ExtractedSignature> extract(const CesPublicKey& pk, const PartBytes& m,
                                               const FullSignature& sig,
                                               const std::vector<int>& chosen) {
  std::vector<int> ci = chosen;
  std::sort(ci.begin(), ci.end());
  ci.erase(std::unique(ci.begin(), ci.end()), ci.end());
  if (ci.empty()) fail(Errc::extraction_policy, "extraction set is empty");
  for (int i : ci) {
    if (i < 1 || i > kParts) fail(Errc::index, "extraction index out of range");
  }
  if (!sig.ceas.subset_of(ci))
    fail(Errc::extraction_policy, "extraction set omits a mandatory CEAS index");
  if (!verify_full(pk, m, sig))
    fail(Errc::invalid_signature, "source signature does not verify");

  PartMap m_prime;
  std::vector<Bigint> deltas;
  deltas.reserve(ci.size());
  for (int i : ci) {
    m_prime[i] = m[i - 1];
    deltas.push_back(sig.deltas[i - 1]);
  }
  return {std::move(m_prime),
          ExtractedSignature{sig.ceas, std::move(ci), sig.tag, sig.r, std::move(deltas)}};
}

bool verify_extracted(const CesPublicKey& pk, const PartMap& m_prime,
                      const ExtractedSignature& esig, Exec exec) {
  const Bigint& p = pk.params.p;
  const Bigint order = p - 1;
  if (!ascending_in_range(esig.ci)) return false;
  if (esig.deltas.size() != esig.ci.size()) return false;
  if (!esig.ceas.subset_of(esig.ci)) return false;
  if (m_prime.size() != esig.ci.size()) return false;
  {
    size_t j = 0;
    for (const auto& [i, bytes] : m_prime) {
      (void)bytes;
      if (i != esig.ci[j++]) return false;
    }
  }
  if (esig.r < 1 || esig.r >= p) return false;
  std::vector<detail::CongruenceItem> items;
  items.reserve(esig.ci.size());
  for (size_t j = 0; j < esig.ci.size(); ++j) {
    const Bigint& delta = esig.deltas[j];
    if (delta < 0 || delta >= order) return false;
    int i = esig.ci[j];
    items.push_back({hash_submessage(ByteView(m_prime.at(i)), esig.ceas, esig.tag, i, p), delta});
  }
  return detail::check_congruences(pk.params, pk.v, esig.r, items, exec);
}

namespace detail {

Bigint delta_for(const Bigint& h, const Bigint& a, const Bigint& r, const Bigint& k_inv,
                 const Bigint& p) {
  const Bigint order = p - 1;
  return mod((h - a * r) * k_inv, order);
}

bool check_congruence(const GroupParams& params, const Bigint& v_pow_r, const Bigint& r,
                      const Bigint& delta, const Bigint& h) {
  Bigint lhs = mod(v_pow_r * powm(r, delta, params.p), params.p);
  Bigint rhs = powm(params.g, h, params.p);
  return lhs == rhs;
}

bool check_congruences(const GroupParams& params, const Bigint& v, const Bigint& r,
                       const std::vector<CongruenceItem>& items, Exec exec) {
  Bigint v_pow_r = powm(v, r, params.p);
  if (use_parallel(exec, items.size(), bit_length(params.p))) {
#ifdef _OPENMP
    std::atomic<bool> ok{true};
#pragma omp parallel for schedule(dynamic)
    for (long idx = 0; idx < static_cast<long>(items.size()); ++idx) {
      if (!ok.load(std::memory_order_relaxed)) continue;
      if (!check_congruence(params, v_pow_r, r, items[idx].delta, items[idx].h))
        ok.store(false, std::memory_order_relaxed);
    }
    return ok.load();
#endif
  }
  for (const CongruenceItem& item : items) {
    if (!check_congruence(params, v_pow_r, r, item.delta, item.h)) return false;
  }
  return true;
}

}  // namespace detail

}  // namespace bpds::ces
