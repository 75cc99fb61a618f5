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

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bpds/ledger.hpp"

namespace bpds::contract {

enum class Action : uint8_t { read, write, copy };

const char* action_name(Action action);

/// One preset permission: who may do what to which parts, and when.
/// The validity window is inclusive at both ends.
struct PermissionGrant {
  AccountId grantee;
  std::vector<int> part_indices;  // ascending subset of 1..7
  std::vector<Action> actions;    // deduplicated, ascending
  Time valid_from = 0;
  Time valid_until = 0;
  bool revoked = false;

  void validate() const;  // non-empty sets, valid_from < valid_until
  bool covers(const AccountId& who, int part, Action action, Time t) const;

  Bytes serialize() const;
  static PermissionGrant deserialize(ByteView data);
  bool operator==(const PermissionGrant&) const = default;
};

/// Patient-signed instruction: the payload bytes plus the signature that
/// authenticates them.
struct SignedCommand {
  Bytes payload;
  emr::AcctSignature sig;
};

SignedCommand sign_command(const emr::AccountKeyPair& signer, Bytes payload);

Bytes encode_grants(const std::vector<PermissionGrant>& grants);
std::vector<PermissionGrant> decode_grants(ByteView payload);

/// Granted request: Index_i || t encrypted to the requester.
struct Message {
  Bytes ct;
};

/// Decrypts a Message: (index bytes, grant timestamp).
std::pair<Bytes, Time> open_message(const emr::AccountKeyPair& requester, const Message& msg);

/// Denied request. Carries only a reason string, never index material.
struct Denial {
  std::string why;
};

using Outcome = std::variant<Message, Denial>;

struct ExecutionRecord {
  Time t = 0;
  std::string op;  // set-permissions | revoke | request
  AccountId actor;
  int part = 0;        // request only
  Action action = Action::read;
  bool granted = false;
  std::string note;
};

/// Per-patient permission contract. Holds its own delegate key pair; the
/// patient re-encrypts each released Index_i to the delegate key, so the
/// contract never sees sk_pat. Every call lands in the execution log.
class Contract {
 public:
  Contract(ObjectId subject, emr::AccountPublicKey patient_pk, Rng rng);

  const ObjectId& subject() const { return subject_; }
  const emr::AccountPublicKey& delegate_pk() const { return delegate_pk_; }

  /// Files the index for one part. The ciphertext must decrypt under the
  /// delegate key to bytes matching the committed release's digest, and
  /// the release must be signed by this contract's patient.
  void deposit_index(int part, ByteView delegate_ct, const ledger::ReleaseTx& committed);
  bool has_index(int part) const { return vault_.count(part) > 0; }

  /// Merges the signed grants (union semantics). Payload: encode_grants.
  void set_permissions(const SignedCommand& cmd, Time now);

  /// Marks every grant for the payload's grantee (16 raw id bytes)
  /// revoked. Unknown grantee: logged no-op.
  void revoke(const SignedCommand& cmd, Time now);

  /// Evaluates the covering predicate first; on a covered request the
  /// index must be on file (Errc::not_released otherwise). Each call
  /// appends exactly one execution record.
  Outcome handle_request(const ledger::AccessTx& req, const emr::AccountPublicKey& requester_pk,
                         Action action, Time now);

  const std::vector<PermissionGrant>& grants() const { return grants_; }
  const std::vector<ExecutionRecord>& execution_log() const { return log_; }
  std::string dump_log() const;

 private:
  void authorize(const SignedCommand& cmd) const;
  void log(ExecutionRecord record);

  ObjectId subject_;
  emr::AccountPublicKey patient_pk_;
  emr::AccountKeyPair delegate_kp_;
  emr::AccountPublicKey delegate_pk_;
  Rng rng_;
  std::vector<PermissionGrant> grants_;
  std::map<int, Bytes> vault_;  // part -> Index_i ciphertext under the delegate key
  std::vector<ExecutionRecord> log_;
};

}  // namespace bpds::contract
