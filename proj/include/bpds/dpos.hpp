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
#include <vector>

#include "bpds/ledger.hpp"

namespace bpds::dpos {

inline constexpr int kRpnCount = 30;       // block producers per cycle
inline constexpr int kAtnCount = 20;       // accounting (audit) nodes per cycle
inline constexpr Time kSlotMs = 10000;     // one block slot
inline constexpr Time kCycleMs = 300000;   // election cycle; 30 slots
inline constexpr int kMinEligible = kRpnCount + kAtnCount;

struct CreditConfig {
  int initial = 100;
  int produced_block = 1;
  int correct_audit = 1;
  int missed_slot = -5;
  int incorrect_audit = -10;
  int threshold = 50;  // minimum score to stand for election
  int floor = 0;
};

enum class CreditKind : uint8_t {
  produced_block,
  correct_audit,
  missed_slot,
  incorrect_audit,
};

const char* credit_kind_name(CreditKind kind);
int credit_delta(CreditKind kind, const CreditConfig& config);

struct CreditEvent {
  NodeId node;
  CreditKind kind = CreditKind::produced_block;
  Time t = 0;
};

/// Credit scores for the whole roster. Ranking is score descending with
/// node id ascending as the tie-break.
class CreditTable {
 public:
  CreditTable() = default;
  CreditTable(const std::vector<NodeId>& nodes, int initial);

  bool contains(NodeId id) const { return scores_.count(id) > 0; }
  int score(NodeId id) const;
  void apply(const CreditEvent& event, const CreditConfig& config);

  std::vector<std::pair<NodeId, int>> ranked() const;
  std::vector<NodeId> eligible(int threshold) const;  // ranked order
  size_t size() const { return scores_.size(); }
  const std::map<NodeId, int>& scores() const { return scores_; }

 private:
  std::map<NodeId, int> scores_;
};

/// One cycle's elected roster: 30 producers (one slot each, in rank
/// order) and 20 auditors.
struct Schedule {
  uint64_t cycle = 0;
  Time start = 0;
  std::vector<NodeId> rpn;
  std::vector<NodeId> atn;

  NodeId producer_for_slot(int slot) const;  // slot in [0, 30)
  int slot_for_time(Time t) const;           // t within [start, start + cycle)
  Time slot_start(int slot) const { return start + slot * kSlotMs; }
  bool is_auditor(NodeId id) const;
};

/// Credit-ranked election. Nodes below the threshold are excluded; fewer
/// than 50 eligible nodes cannot fill the roster (Errc::configuration).
Schedule elect(const CreditTable& table, const CreditConfig& config, uint64_t cycle,
               Time start);

/// Re-election at a cycle boundary. Any t not on a boundary is a
/// scheduling fault.
Schedule cycle_readjust(const CreditTable& table, const CreditConfig& config, Time t);

/// Audit of a serialized candidate block against the auditor's replica
/// tip and the slot schedule. Approves (res 1, reason 0) iff the record
/// decodes and validates; rejects (res 0, reason 1) otherwise.
ledger::Endorsement audit_block(ByteView rec, const ledger::Block* prev,
                                const ledger::ValidatorRegistry& reg, NodeId expected_producer,
                                const emr::AccountKeyPair& auditor, Time now);

/// Signs an endorsement verdict outright. audit_block uses it; byzantine
/// actors use it to sign whatever verdict they please.
ledger::Endorsement make_endorsement(const emr::AccountKeyPair& auditor, uint8_t res,
                                     uint8_t reason, Time now);

/// Audit reply on the wire: the endorsement encrypted to the producer.
struct AuditReply {
  Bytes ct;
};

AuditReply seal_reply(const ledger::Endorsement& endorsement,
                      const emr::AccountPublicKey& rpn_pk, Rng& rng);

/// Decrypts and re-parses the endorsement. Throws Errc::decrypt /
/// Errc::decode when the reply is not for this producer or is mangled.
ledger::Endorsement open_reply(const emr::AccountKeyPair& rpn_kp, const AuditReply& reply);

struct TallyResult {
  bool committed = false;
  int approvals = 0;  // distinct auditors with a valid approving signature
  std::vector<ledger::Endorsement> endorsements;  // valid, deduplicated, reply order
};

/// Resolves one audit round: keeps the first valid reply per auditor,
/// counts approvals, commits iff approvals reach ceil(0.51 * atn_count).
TallyResult tally(const std::vector<ledger::Endorsement>& replies,
                  const ledger::ValidatorRegistry& reg, int atn_count);

}  // namespace bpds::dpos
