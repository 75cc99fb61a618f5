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
#include <string>

#include "bpds/ces.hpp"
#include "bpds/clock.hpp"
#include "bpds/group.hpp"
#include "bpds/hash.hpp"
#include "bpds/symcipher.hpp"

namespace bpds::emr {

enum class Role : uint8_t { patient, doctor, user, node };

const char* role_name(Role role);

/// Seven-part medical record. Parts are indexed 1..7 throughout the
/// system; parts[i-1] holds part i.
struct EmrDocument {
  ces::PartBytes parts;

  /// Canonical part names in index order.
  static const std::array<const char*, ces::kParts>& part_names();

  /// Every part must be non-empty.
  void validate() const;
};

struct AccountPublicKey {
  GroupParams params;
  Bigint y;  // g^x mod p
};

/// Discrete-log account keys: ElGamal-style hybrid encryption plus a
/// Schnorr-style signature, both over the shared GroupParams.
struct AccountKeyPair {
  GroupParams params;
  Bigint x;  // private exponent
  Bigint y;  // g^x mod p
  Role role = Role::node;

  AccountPublicKey public_key() const { return {params, y}; }
  AccountId id() const;
};

AccountKeyPair acct_keygen(const GroupParams& params, Role role, Rng& rng);

/// Account handle: leading 16 bytes of the digest of the public value.
AccountId account_id_for(const Bigint& y);

/// Hybrid encryption: ephemeral c1 = g^e, shared = y^e, symmetric key =
/// H(c1 || shared), payload sealed with the authenticated cipher.
Bytes asym_encrypt(const AccountPublicKey& pk, ByteView plaintext, Rng& rng);

/// Inverts asym_encrypt; throws Errc::decrypt on a wrong key or any
/// tampering, Errc::decode on a structurally broken blob.
Bytes asym_decrypt(const AccountKeyPair& kp, ByteView ciphertext);

/// Schnorr-style signature. The challenge binds the message digest, so a
/// verifier holding only H(message) can still check it.
struct AcctSignature {
  Bigint e;
  Bigint s;

  Bytes serialize() const;
  static AcctSignature deserialize(ByteView data);
  bool operator==(const AcctSignature&) const = default;
};

AcctSignature acct_sign(const AccountKeyPair& kp, ByteView message);
bool acct_verify(const AccountPublicKey& pk, ByteView message, const AcctSignature& sig);

/// Digest-level variants: sign/verify against H(message) directly.
AcctSignature acct_sign_digest(const AccountKeyPair& kp, const Digest& mdigest);
bool acct_verify_digest(const AccountPublicKey& pk, const Digest& mdigest,
                        const AcctSignature& sig);
bool acct_verify_digest(const GroupParams& params, const Bigint& pk_value,
                        const Digest& mdigest, const AcctSignature& sig);

/// Doctor-to-patient envelope: payload_ct seals (M || h_1..h_7 || full
/// signature || CEAS || T) under the document key; key_ct carries the
/// document key to the patient.
struct InfoEnvelope {
  Bytes payload_ct;
  Bytes key_ct;

  Bytes serialize() const;
  static InfoEnvelope deserialize(ByteView data);
};

struct OpenedInfo {
  EmrDocument emr;
  std::array<Bigint, ces::kParts> digests;
  ces::FullSignature sig;
  ces::Ceas ceas;
  ces::CesTag tag;
};

InfoEnvelope package_info(const SymKey& k_doc, const AccountPublicKey& patient_pk,
                          const EmrDocument& emr,
                          const std::array<Bigint, ces::kParts>& digests,
                          const ces::FullSignature& sig, const ces::Ceas& ceas,
                          const ces::CesTag& tag, Rng& rng);

OpenedInfo open_info(const AccountKeyPair& patient_kp, const InfoEnvelope& envelope);

/// On-chain pointer to one stored EMR part. t is in simulated seconds,
/// converted from the millisecond clock at build time.
struct EmrIndex {
  std::string url;
  Bigint h;
  int64_t t = 0;

  Bytes serialize() const;
  static EmrIndex deserialize(ByteView data);
  bool operator==(const EmrIndex&) const = default;
};

EmrIndex build_index(const std::string& url, const Bigint& h, const Clock& clock);

}  // namespace bpds::emr
