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

#include "bpds/emr.hpp"

#include <algorithm>

#include "bpds/codec.hpp"
#include "bpds/errors.hpp"

namespace bpds::emr {

namespace {

Bigint read_canonical_bigint(ByteReader& rd) { return read_bigint_block(rd); }

SymKey derive_shared_key(const Bigint& c1, const Bigint& shared) {
  ByteWriter w;
  w.block(bigint_to_bytes(c1));
  w.block(bigint_to_bytes(shared));
  Digest d = sha256(w.bytes());
  SymKey key;
  std::copy(d.begin(), d.end(), key.bytes.begin());
  return key;
}

// Deterministic per-signature nonce: hashing the private key with the
// message digest removes any nonce-reuse hazard and keeps runs replayable.
Bigint derive_nonce(const Bigint& x, const Digest& mdigest, const Bigint& order) {
  ByteWriter w;
  w.block(bigint_to_bytes(x));
  w.raw(ByteView(mdigest.data(), mdigest.size()));
  return mod(bigint_from_digest(sha256(w.bytes())), order - 1) + 1;
}

Bigint challenge(const Bigint& commitment, const Digest& mdigest, const Bigint& order) {
  ByteWriter w;
  w.block(bigint_to_bytes(commitment));
  w.raw(ByteView(mdigest.data(), mdigest.size()));
  return mod(bigint_from_digest(sha256(w.bytes())), order);
}

}  // namespace

const char* role_name(Role role) {
  switch (role) {
    case Role::patient:
      return "patient";
    case Role::doctor:
      return "doctor";
    case Role::user:
      return "user";
    case Role::node:
      return "node";
  }
  fail(Errc::parameter, "unknown role");
}

const std::array<const char*, ces::kParts>& EmrDocument::part_names() {
  static const std::array<const char*, ces::kParts> names = {
      "name",        "gender",      "age", "id_number", "medical_history",
      "examination", "prescription"};
  return names;
}

void EmrDocument::validate() const {
  for (int i = 0; i < ces::kParts; ++i) {
    if (parts[i].empty()) {
      fail(Errc::parameter, std::string("EMR part is empty: ") + part_names()[i]);
    }
  }
}

AccountId account_id_for(const Bigint& y) {
  Digest d = sha256(bigint_to_bytes(y));
  AccountId id;
  std::copy(d.begin(), d.begin() + id.bytes.size(), id.bytes.begin());
  return id;
}

AccountId AccountKeyPair::id() const { return account_id_for(y); }

AccountKeyPair acct_keygen(const GroupParams& params, Role role, Rng& rng) {
  if (params.p < 5) fail(Errc::parameter, "group modulus too small");
  Bigint x = uniform_range(rng, 1, params.p - 2);
  return AccountKeyPair{params, x, powm(params.g, x, params.p), role};
}

Bytes asym_encrypt(const AccountPublicKey& pk, ByteView plaintext, Rng& rng) {
  const Bigint& p = pk.params.p;
  if (pk.y < 1 || pk.y >= p) fail(Errc::parameter, "public value out of range");
  Bigint eph = uniform_range(rng, 1, p - 2);
  Bigint c1 = powm(pk.params.g, eph, p);
  Bigint shared = powm(pk.y, eph, p);
  SymKey key = derive_shared_key(c1, shared);
  ByteWriter w;
  w.block(bigint_to_bytes(c1));
  w.block(aead_seal(key, plaintext, rng));
  return w.take();
}

Bytes asym_decrypt(const AccountKeyPair& kp, ByteView ciphertext) {
  ByteReader rd(ciphertext);
  Bigint c1 = read_canonical_bigint(rd);
  Bytes sealed = rd.block();
  rd.expect_done();
  const Bigint& p = kp.params.p;
  if (c1 < 1 || c1 >= p) fail(Errc::decrypt, "ephemeral value out of range");
  Bigint shared = powm(c1, kp.x, p);
  SymKey key = derive_shared_key(c1, shared);
  return aead_open(key, sealed);
}

Bytes AcctSignature::serialize() const {
  ByteWriter w;
  w.block(bigint_to_bytes(e));
  w.block(bigint_to_bytes(s));
  return w.take();
}

AcctSignature AcctSignature::deserialize(ByteView data) {
  ByteReader rd(data);
  Bigint e = read_canonical_bigint(rd);
  Bigint s = read_canonical_bigint(rd);
  rd.expect_done();
  return AcctSignature{std::move(e), std::move(s)};
}

AcctSignature acct_sign_digest(const AccountKeyPair& kp, const Digest& mdigest) {
  const Bigint& p = kp.params.p;
  const Bigint order = p - 1;
  Bigint k = derive_nonce(kp.x, mdigest, order);
  Bigint commitment = powm(kp.params.g, k, p);
  Bigint e = challenge(commitment, mdigest, order);
  Bigint s = mod(k - kp.x * e, order);
  return AcctSignature{std::move(e), std::move(s)};
}

bool acct_verify_digest(const GroupParams& params, const Bigint& pk_value,
                        const Digest& mdigest, const AcctSignature& sig) {
  const Bigint& p = params.p;
  const Bigint order = p - 1;
  if (pk_value < 1 || pk_value >= p) return false;
  if (sig.e < 0 || sig.e >= order) return false;
  if (sig.s < 0 || sig.s >= order) return false;
  Bigint commitment = mod(powm(params.g, sig.s, p) * powm(pk_value, sig.e, p), p);
  return challenge(commitment, mdigest, order) == sig.e;
}

bool acct_verify_digest(const AccountPublicKey& pk, const Digest& mdigest,
                        const AcctSignature& sig) {
  return acct_verify_digest(pk.params, pk.y, mdigest, sig);
}

AcctSignature acct_sign(const AccountKeyPair& kp, ByteView message) {
  return acct_sign_digest(kp, sha256(message));
}

bool acct_verify(const AccountPublicKey& pk, ByteView message, const AcctSignature& sig) {
  return acct_verify_digest(pk, sha256(message), sig);
}

Bytes InfoEnvelope::serialize() const {
  ByteWriter w;
  w.block(payload_ct);
  w.block(key_ct);
  return w.take();
}

InfoEnvelope InfoEnvelope::deserialize(ByteView data) {
  ByteReader rd(data);
  Bytes payload_ct = rd.block();
  Bytes key_ct = rd.block();
  rd.expect_done();
  return InfoEnvelope{std::move(payload_ct), std::move(key_ct)};
}

InfoEnvelope package_info(const SymKey& k_doc, const AccountPublicKey& patient_pk,
                          const EmrDocument& emr,
                          const std::array<Bigint, ces::kParts>& digests,
                          const ces::FullSignature& sig, const ces::Ceas& ceas,
                          const ces::CesTag& tag, Rng& rng) {
  emr.validate();
  ByteWriter w;
  for (const Bytes& part : emr.parts) w.block(part);
  for (const Bigint& h : digests) w.block(bigint_to_bytes(h));
  w.block(sig.serialize());
  w.u8(static_cast<uint8_t>(ceas.indices().size()));
  for (int i : ceas.indices()) w.u8(static_cast<uint8_t>(i));
  w.raw(ByteView(tag.bytes.data(), tag.bytes.size()));

  InfoEnvelope envelope;
  envelope.payload_ct = aead_seal(k_doc, w.bytes(), rng);
  envelope.key_ct =
      asym_encrypt(patient_pk, ByteView(k_doc.bytes.data(), k_doc.bytes.size()), rng);
  return envelope;
}

OpenedInfo open_info(const AccountKeyPair& patient_kp, const InfoEnvelope& envelope) {
  Bytes key_bytes = asym_decrypt(patient_kp, envelope.key_ct);
  if (key_bytes.size() != 32) fail(Errc::decrypt, "document key has the wrong size");
  SymKey k_doc;
  std::copy(key_bytes.begin(), key_bytes.end(), k_doc.bytes.begin());

  Bytes packed = aead_open(k_doc, envelope.payload_ct);
  ByteReader rd(packed);
  EmrDocument emr;
  for (int i = 0; i < ces::kParts; ++i) emr.parts[i] = rd.block();
  std::array<Bigint, ces::kParts> digests;
  for (int i = 0; i < ces::kParts; ++i) digests[i] = read_canonical_bigint(rd);
  Bytes sig_bytes = rd.block();
  ces::FullSignature sig = ces::FullSignature::deserialize(sig_bytes);
  size_t ceas_count = rd.u8();
  std::vector<int> ceas_indices;
  for (size_t j = 0; j < ceas_count; ++j) ceas_indices.push_back(rd.u8());
  ces::CesTag tag;
  Bytes tag_bytes = rd.raw(tag.bytes.size());
  std::copy(tag_bytes.begin(), tag_bytes.end(), tag.bytes.begin());
  rd.expect_done();

  return OpenedInfo{std::move(emr), std::move(digests), std::move(sig),
                    ces::Ceas(std::move(ceas_indices)), tag};
}

Bytes EmrIndex::serialize() const {
  ByteWriter w;
  w.str(url);
  w.block(bigint_to_bytes(h));
  w.i64(t);
  return w.take();
}

EmrIndex EmrIndex::deserialize(ByteView data) {
  ByteReader rd(data);
  std::string url = rd.str();
  Bigint h = read_canonical_bigint(rd);
  int64_t t = rd.i64();
  rd.expect_done();
  return EmrIndex{std::move(url), std::move(h), t};
}

EmrIndex build_index(const std::string& url, const Bigint& h, const Clock& clock) {
  if (url.empty()) fail(Errc::parameter, "index url must be non-empty");
  return EmrIndex{url, h, clock.now() / 1000};
}

}  // namespace bpds::emr
