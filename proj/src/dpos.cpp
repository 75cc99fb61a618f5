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

#include "bpds/dpos.hpp"

#include <algorithm>
#include <set>

#include "bpds/errors.hpp"

namespace bpds::dpos {

const char* credit_kind_name(CreditKind kind) {
  switch (kind) {
    case CreditKind::produced_block:
      return "produced-block";
    case CreditKind::correct_audit:
      return "correct-audit";
    case CreditKind::missed_slot:
      return "missed-slot";
    case CreditKind::incorrect_audit:
      return "incorrect-audit";
  }
  fail(Errc::parameter, "unknown credit event kind");
}

int credit_delta(CreditKind kind, const CreditConfig& config) {
  switch (kind) {
    case CreditKind::produced_block:
      return config.produced_block;
    case CreditKind::correct_audit:
      return config.correct_audit;
    case CreditKind::missed_slot:
      return config.missed_slot;
    case CreditKind::incorrect_audit:
      return config.incorrect_audit;
  }
  fail(Errc::parameter, "unknown credit event kind");
}

CreditTable::CreditTable(const std::vector<NodeId>& nodes, int initial) {
  for (NodeId id : nodes) {
    if (!scores_.emplace(id, initial).second) {
      fail(Errc::parameter, "duplicate node id in credit roster");
    }
  }
}

int CreditTable::score(NodeId id) const {
  auto it = scores_.find(id);
  if (it == scores_.end()) fail(Errc::not_found, "node not in credit table");
  return it->second;
}

void CreditTable::apply(const CreditEvent& event, const CreditConfig& config) {
  auto it = scores_.find(event.node);
  if (it == scores_.end()) fail(Errc::not_found, "node not in credit table");
  it->second = std::max(config.floor, it->second + credit_delta(event.kind, config));
}

std::vector<std::pair<NodeId, int>> CreditTable::ranked() const {
  std::vector<std::pair<NodeId, int>> rows(scores_.begin(), scores_.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return rows;
}

std::vector<NodeId> CreditTable::eligible(int threshold) const {
  std::vector<NodeId> out;
  for (const auto& [id, score] : ranked()) {
    if (score >= threshold) out.push_back(id);
  }
  return out;
}

NodeId Schedule::producer_for_slot(int slot) const {
  if (slot < 0 || slot >= static_cast<int>(rpn.size())) {
    fail(Errc::scheduling, "slot outside the cycle");
  }
  return rpn[static_cast<size_t>(slot)];
}

int Schedule::slot_for_time(Time t) const {
  if (t < start || t >= start + kCycleMs) fail(Errc::scheduling, "time outside the cycle");
  return static_cast<int>((t - start) / kSlotMs);
}

bool Schedule::is_auditor(NodeId id) const {
  return std::find(atn.begin(), atn.end(), id) != atn.end();
}

Schedule elect(const CreditTable& table, const CreditConfig& config, uint64_t cycle,
               Time start) {
  std::vector<NodeId> pool = table.eligible(config.threshold);
  if (pool.size() < static_cast<size_t>(kMinEligible)) {
    fail(Errc::configuration, "fewer than " + std::to_string(kMinEligible) +
                                  " nodes eligible for election");
  }
  Schedule s;
  s.cycle = cycle;
  s.start = start;
  s.rpn.assign(pool.begin(), pool.begin() + kRpnCount);
  s.atn.assign(pool.begin() + kRpnCount, pool.begin() + kMinEligible);
  return s;
}

Schedule cycle_readjust(const CreditTable& table, const CreditConfig& config, Time t) {
  if (t < 0 || t % kCycleMs != 0) {
    fail(Errc::scheduling, "credit readjustment off the cycle boundary");
  }
  return elect(table, config, static_cast<uint64_t>(t / kCycleMs), t);
}

ledger::Endorsement make_endorsement(const emr::AccountKeyPair& auditor, uint8_t res,
                                     uint8_t reason, Time now) {
  ledger::Endorsement e;
  e.pk_atn = auditor.y;
  e.res = res;
  e.reason = reason;
  e.t = now;
  e.sig = emr::acct_sign(auditor, ledger::endorsement_message(res, reason, now));
  return e;
}

ledger::Endorsement audit_block(ByteView rec, const ledger::Block* prev,
                                const ledger::ValidatorRegistry& reg, NodeId expected_producer,
                                const emr::AccountKeyPair& auditor, Time now) {
  uint8_t res = 0;
  uint8_t reason = 1;
  try {
    ledger::Block block = ledger::Block::deserialize(rec);
    ledger::Validation v = ledger::validate_block(block, prev, reg, expected_producer);
    if (v.ok) {
      res = 1;
      reason = 0;
    }
  } catch (const Error&) {
    res = 0;
    reason = 1;
  }
  return make_endorsement(auditor, res, reason, now);
}

AuditReply seal_reply(const ledger::Endorsement& endorsement,
                      const emr::AccountPublicKey& rpn_pk, Rng& rng) {
  return AuditReply{emr::asym_encrypt(rpn_pk, endorsement.serialize(), rng)};
}

ledger::Endorsement open_reply(const emr::AccountKeyPair& rpn_kp, const AuditReply& reply) {
  return ledger::Endorsement::deserialize(emr::asym_decrypt(rpn_kp, reply.ct));
}

TallyResult tally(const std::vector<ledger::Endorsement>& replies,
                  const ledger::ValidatorRegistry& reg, int atn_count) {
  TallyResult out;
  std::set<Bigint> seen;
  for (const ledger::Endorsement& e : replies) {
    if (!reg.has_pk(e.pk_atn)) continue;
    Bytes msg = ledger::endorsement_message(e.res, e.reason, e.t);
    if (!emr::acct_verify(emr::AccountPublicKey{reg.params, e.pk_atn}, msg, e.sig)) continue;
    if (!seen.insert(e.pk_atn).second) continue;
    out.endorsements.push_back(e);
    if (e.res == 1) ++out.approvals;
  }
  out.committed = out.approvals >= ledger::quorum_threshold(atn_count);
  return out;
}

}  // namespace bpds::dpos
