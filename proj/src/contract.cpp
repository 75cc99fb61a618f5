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

#include "bpds/contract.hpp"

#include <algorithm>
#include <sstream>

#include "bpds/errors.hpp"

namespace bpds::contract {

namespace {

void read_id16_into(ByteReader& r, std::array<uint8_t, 16>& out) {
  Bytes raw = r.raw(16);
  std::copy(raw.begin(), raw.end(), out.begin());
}

}  // namespace

const char* action_name(Action action) {
  switch (action) {
    case Action::read:
      return "read";
    case Action::write:
      return "write";
    case Action::copy:
      return "copy";
  }
  fail(Errc::parameter, "unknown action");
}

void PermissionGrant::validate() const {
  if (part_indices.empty()) fail(Errc::parameter, "grant covers no parts");
  for (size_t j = 0; j < part_indices.size(); ++j) {
    if (part_indices[j] < 1 || part_indices[j] > 7) {
      fail(Errc::parameter, "grant part index out of range");
    }
    if (j > 0 && part_indices[j] <= part_indices[j - 1]) {
      fail(Errc::parameter, "grant part indices must ascend");
    }
  }
  if (actions.empty()) fail(Errc::parameter, "grant allows no actions");
  for (size_t j = 0; j < actions.size(); ++j) {
    if (static_cast<uint8_t>(actions[j]) > static_cast<uint8_t>(Action::copy)) {
      fail(Errc::parameter, "grant action out of range");
    }
    if (j > 0 && actions[j] <= actions[j - 1]) {
      fail(Errc::parameter, "grant actions must ascend");
    }
  }
  if (!(valid_from < valid_until)) {
    fail(Errc::parameter, "grant window must have valid_from < valid_until");
  }
}

bool PermissionGrant::covers(const AccountId& who, int part, Action action, Time t) const {
  if (revoked) return false;
  if (!(grantee == who)) return false;
  if (std::find(part_indices.begin(), part_indices.end(), part) == part_indices.end()) {
    return false;
  }
  if (std::find(actions.begin(), actions.end(), action) == actions.end()) return false;
  return valid_from <= t && t <= valid_until;
}

Bytes PermissionGrant::serialize() const {
  ByteWriter w;
  w.raw(ByteView(grantee.bytes.data(), grantee.bytes.size()));
  w.u8(static_cast<uint8_t>(part_indices.size()));
  for (int part : part_indices) w.u8(static_cast<uint8_t>(part));
  w.u8(static_cast<uint8_t>(actions.size()));
  for (Action action : actions) w.u8(static_cast<uint8_t>(action));
  w.i64(valid_from);
  w.i64(valid_until);
  w.u8(revoked ? 1 : 0);
  return w.take();
}

PermissionGrant PermissionGrant::deserialize(ByteView data) {
  ByteReader r(data);
  PermissionGrant g;
  read_id16_into(r, g.grantee.bytes);
  uint8_t parts = r.u8();
  for (uint8_t j = 0; j < parts; ++j) g.part_indices.push_back(r.u8());
  uint8_t actions = r.u8();
  for (uint8_t j = 0; j < actions; ++j) g.actions.push_back(static_cast<Action>(r.u8()));
  g.valid_from = r.i64();
  g.valid_until = r.i64();
  uint8_t revoked = r.u8();
  if (revoked > 1) fail(Errc::decode, "revoked flag must be 0 or 1");
  g.revoked = revoked == 1;
  r.expect_done();
  try {
    g.validate();
  } catch (const Error& e) {
    fail(Errc::decode, e.what());
  }
  return g;
}

SignedCommand sign_command(const emr::AccountKeyPair& signer, Bytes payload) {
  emr::AcctSignature sig = emr::acct_sign(signer, payload);
  return SignedCommand{std::move(payload), std::move(sig)};
}

Bytes encode_grants(const std::vector<PermissionGrant>& grants) {
  ByteWriter w;
  w.u32(static_cast<uint32_t>(grants.size()));
  for (const PermissionGrant& g : grants) w.block(g.serialize());
  return w.take();
}

std::vector<PermissionGrant> decode_grants(ByteView payload) {
  ByteReader r(payload);
  uint32_t count = r.u32();
  std::vector<PermissionGrant> grants;
  grants.reserve(std::min<uint32_t>(count, 1024));
  for (uint32_t j = 0; j < count; ++j) {
    grants.push_back(PermissionGrant::deserialize(r.block()));
  }
  r.expect_done();
  return grants;
}

std::pair<Bytes, Time> open_message(const emr::AccountKeyPair& requester, const Message& msg) {
  Bytes plain = emr::asym_decrypt(requester, msg.ct);
  ByteReader r(plain);
  Bytes index_bytes = r.block();
  Time t = r.i64();
  r.expect_done();
  return {std::move(index_bytes), t};
}

Contract::Contract(ObjectId subject, emr::AccountPublicKey patient_pk, Rng rng)
    : subject_(subject),
      patient_pk_(std::move(patient_pk)),
      delegate_kp_(emr::acct_keygen(patient_pk_.params, emr::Role::node, rng)),
      delegate_pk_(delegate_kp_.public_key()),
      rng_(std::move(rng)) {}

void Contract::authorize(const SignedCommand& cmd) const {
  if (!emr::acct_verify(patient_pk_, cmd.payload, cmd.sig)) {
    fail(Errc::authorization, "command not signed by the contract's patient");
  }
}

void Contract::log(ExecutionRecord record) { log_.push_back(std::move(record)); }

void Contract::deposit_index(int part, ByteView delegate_ct, const ledger::ReleaseTx& committed) {
  if (part < 1 || part > 7) fail(Errc::index, "part index out of range");
  if (committed.signer_pk != patient_pk_.y) {
    fail(Errc::authorization, "release not signed by the contract's patient");
  }
  if (!emr::acct_verify_digest(patient_pk_, committed.index_hash, committed.sig)) {
    fail(Errc::invalid_signature, "release signature does not verify");
  }
  Bytes index_bytes = emr::asym_decrypt(delegate_kp_, delegate_ct);
  if (sha256(index_bytes) != committed.index_hash) {
    fail(Errc::validation, "deposited index does not match the committed digest");
  }
  vault_[part] = Bytes(delegate_ct.begin(), delegate_ct.end());
}

void Contract::set_permissions(const SignedCommand& cmd, Time now) {
  authorize(cmd);
  std::vector<PermissionGrant> incoming = decode_grants(cmd.payload);
  for (PermissionGrant& g : incoming) {
    g.validate();
    grants_.push_back(std::move(g));
  }
  ExecutionRecord rec;
  rec.t = now;
  rec.op = "set-permissions";
  rec.actor = emr::account_id_for(patient_pk_.y);
  rec.note = "added " + std::to_string(incoming.size()) + " grants";
  log(std::move(rec));
}

void Contract::revoke(const SignedCommand& cmd, Time now) {
  authorize(cmd);
  if (cmd.payload.size() != 16) fail(Errc::parameter, "revoke payload must be one account id");
  AccountId grantee;
  std::copy(cmd.payload.begin(), cmd.payload.end(), grantee.bytes.begin());

  int hit = 0;
  for (PermissionGrant& g : grants_) {
    if (g.grantee == grantee && !g.revoked) {
      g.revoked = true;
      ++hit;
    }
  }
  ExecutionRecord rec;
  rec.t = now;
  rec.op = "revoke";
  rec.actor = emr::account_id_for(patient_pk_.y);
  rec.note = hit > 0 ? "revoked " + std::to_string(hit) + " grants for " + grantee.hex()
                     : "unknown grantee " + grantee.hex();
  log(std::move(rec));
}

Outcome Contract::handle_request(const ledger::AccessTx& req,
                                 const emr::AccountPublicKey& requester_pk, Action action,
                                 Time now) {
  ExecutionRecord rec;
  rec.t = now;
  rec.op = "request";
  rec.actor = req.requester;
  rec.part = req.i;
  rec.action = action;

  auto deny = [&](const std::string& why) -> Outcome {
    rec.granted = false;
    rec.note = why;
    log(std::move(rec));
    return Denial{why};
  };

  if (emr::account_id_for(requester_pk.y) != req.requester) {
    return deny("requester key does not match the request id");
  }
  if (!(req.obj == subject_)) {
    return deny("request targets a different object");
  }

  bool any_for_grantee = false;
  bool any_live = false;
  bool any_part_action = false;
  bool covered = false;
  for (const PermissionGrant& g : grants_) {
    if (!(g.grantee == req.requester)) continue;
    any_for_grantee = true;
    if (g.revoked) continue;
    any_live = true;
    bool part_ok = std::find(g.part_indices.begin(), g.part_indices.end(), req.i) !=
                   g.part_indices.end();
    bool action_ok = std::find(g.actions.begin(), g.actions.end(), action) != g.actions.end();
    if (part_ok && action_ok) {
      any_part_action = true;
      if (g.covers(req.requester, req.i, action, req.t)) {
        covered = true;
        break;
      }
    }
  }

  if (!covered) {
    if (!any_for_grantee) return deny("no grant for requester");
    if (!any_live) return deny("grants revoked");
    if (any_part_action) return deny("outside validity window");
    return deny("no covering grant");
  }

  auto it = vault_.find(req.i);
  if (it == vault_.end()) {
    rec.granted = false;
    rec.note = "index not released";
    log(std::move(rec));
    fail(Errc::not_released, "no released index for part " + std::to_string(req.i));
  }

  Bytes index_bytes = emr::asym_decrypt(delegate_kp_, it->second);
  ByteWriter plain;
  plain.block(index_bytes);
  plain.i64(now);
  Bytes ct = emr::asym_encrypt(requester_pk, plain.bytes(), rng_);

  rec.granted = true;
  rec.note = "released part " + std::to_string(req.i);
  log(std::move(rec));
  return Message{std::move(ct)};
}

std::string Contract::dump_log() const {
  std::ostringstream out;
  for (const ExecutionRecord& r : log_) {
    out << "t=" << r.t << " op=" << r.op << " actor=" << r.actor.hex();
    if (r.op == "request") {
      out << " part=" << r.part << " action=" << action_name(r.action)
          << " granted=" << (r.granted ? 1 : 0);
    }
    out << " note=" << r.note << "\n";
  }
  return out.str();
}

}  // namespace bpds::contract
