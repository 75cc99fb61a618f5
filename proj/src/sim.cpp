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

#include "bpds/sim.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bpds/bignum.hpp"
#include "bpds/cloud.hpp"
#include "bpds/codec.hpp"
#include "bpds/errors.hpp"
#include "bpds/hash.hpp"

namespace bpds::sim {

namespace {

// Wire message kinds between simulated endpoints.
constexpr uint8_t kMsgSubmitRelease = 1;
constexpr uint8_t kMsgSubmitAccess = 2;
constexpr uint8_t kMsgRec = 3;
constexpr uint8_t kMsgReply = 4;
constexpr uint8_t kMsgCommit = 5;
constexpr uint8_t kMsgOutcome = 6;
constexpr uint8_t kMsgEnvelope = 7;

constexpr uint32_t kEndpointBase = 100000;

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (size_t j = 0; j < v.size(); ++j) {
    if (j) out += ",";
    out += std::to_string(v[j]);
  }
  return out;
}

std::string join_nodes(const std::vector<NodeId>& v) {
  std::string out;
  for (size_t j = 0; j < v.size(); ++j) {
    if (j) out += ",";
    out += std::to_string(v[j].value);
  }
  return out;
}

struct SimNode {
  NodeId id;
  emr::AccountKeyPair keys;
  ledger::Chain replica;
  bool alive = true;
  Time byz_from = 0;
  Time byz_until = 0;

  bool byzantine_at(Time t) const { return t >= byz_from && t < byz_until; }
};

struct ActorState {
  ActorSpec spec;
  emr::AccountKeyPair keys;
  NodeId endpoint;

  // Patient side, filled by a verified visit.
  std::optional<emr::OpenedInfo> info;
  std::optional<ces::CesPublicKey> ces_pk;
  ObjectId obj;  // patients only: the contract subject
};

/// One request event's retrieval progress at the requesting user.
struct Retrieval {
  std::string requester;
  std::string patient;
  std::vector<int> parts;
  Time event_t = 0;
  std::map<int, cloud::RetrievedPart> received;
  bool failed = false;
};

struct PendingRelease {
  std::string patient;
  int part = 0;
};

struct PendingAccess {
  contract::Action action = contract::Action::read;
  std::string retrieval_key;
  std::string requester;
};

/// In-flight audit round for one block slot.
struct SlotRound {
  uint64_t gslot = 0;
  NodeId producer;
  ledger::Block block;
  Bytes rec;
  std::vector<ledger::Endorsement> replies;
  bool resolved = false;
};

class Runner {
 public:
  explicit Runner(const Scenario& s)
      : scenario_(s),
        params_(s.group()),
        master_(s.seed),
        sim_(s.net, master_.next()),
        mempool_(params_),
        credit_config_(make_credit_config(s)),
        cloud_(master_.fork()),
        rng_(master_.fork()) {}

  RunOutput run();

 private:
  static dpos::CreditConfig make_credit_config(const Scenario& s) {
    dpos::CreditConfig config;
    config.initial = s.initial_credit;
    return config;
  }

  void setup();
  void setup_nodes();
  void setup_actors();
  void schedule_cycle(Time start);
  void on_slot(uint64_t gslot);
  void on_tally(uint64_t gslot);
  void on_cycle_boundary(Time t);
  void node_handle(SimNode& node, NodeId from, ByteView payload);
  void endpoint_handle(ActorState& actor, NodeId from, ByteView payload);
  void handle_rec(SimNode& node, ByteView body);
  void handle_commit(SimNode& node, ByteView body);
  void process_committed(const ledger::Block& block, NodeId producer, Time now);
  void run_timeline_event(const TimelineEvent& e);
  void do_visit(const TimelineEvent& e);
  void do_release(const TimelineEvent& e);
  void do_grant(const TimelineEvent& e);
  void do_revoke(const TimelineEvent& e);
  void do_request(const TimelineEvent& e);
  void finish_retrieval(Retrieval& r);

  NodeId current_producer() const;
  void credit(NodeId node, dpos::CreditKind kind, Time t);
  void consensus_log(const std::string& line);
  void summary_log(const std::string& line);
  void invariant_fail(const std::string& what);
  void check_replica(const SimNode& node);
  ActorState& actor(const std::string& label);
  ActorState* patient_for_obj(const ObjectId& obj);
  void build_artifacts(RunOutput& out);

  Scenario scenario_;
  GroupParams params_;
  Rng master_;
  net::Simulator sim_;
  ledger::Mempool mempool_;
  dpos::CreditConfig credit_config_;
  cloud::CloudStore cloud_;
  Rng rng_;

  std::vector<SimNode> nodes_;
  ledger::ValidatorRegistry registry_;
  dpos::CreditTable credits_;
  std::vector<dpos::CreditEvent> credit_events_;
  dpos::Schedule schedule_;
  std::vector<dpos::Schedule> schedules_;
  std::vector<Time> commit_times_;
  std::vector<Time> readjust_times_;
  int missed_slots_ = 0;
  int no_commits_ = 0;

  std::map<std::string, ActorState> actors_;
  std::vector<std::string> actor_order_;
  std::map<std::string, contract::Contract> contracts_;  // by patient label
  std::map<std::string, PendingRelease> pending_release_;  // by index_hash hex
  std::map<std::string, PendingAccess> pending_access_;
  std::map<std::string, Retrieval> retrievals_;

  ledger::Chain committed_;
  std::vector<Digest> canonical_;  // d_hash per height
  std::map<uint64_t, SlotRound> rounds_;

  std::vector<std::string> consensus_lines_;
  std::vector<std::string> summary_lines_;
  std::map<std::string, bool> verify_results_;
  size_t probe_cursor_ = 0;

  bool ok_ = true;
  std::string failure_;
};

NodeId Runner::current_producer() const {
  return schedule_.producer_for_slot(schedule_.slot_for_time(sim_.now()));
}

void Runner::credit(NodeId node, dpos::CreditKind kind, Time t) {
  dpos::CreditEvent event{node, kind, t};
  credits_.apply(event, credit_config_);
  credit_events_.push_back(event);
  consensus_log("credit t=" + std::to_string(t) + " node=" + std::to_string(node.value) +
                " kind=" + dpos::credit_kind_name(kind));
}

void Runner::consensus_log(const std::string& line) { consensus_lines_.push_back(line); }

void Runner::summary_log(const std::string& line) { summary_lines_.push_back(line); }

void Runner::invariant_fail(const std::string& what) {
  if (ok_) {
    ok_ = false;
    failure_ = what;
  }
  consensus_log("invariant-violation " + what);
}

void Runner::check_replica(const SimNode& node) {
  const auto& blocks = node.replica.blocks;
  if (blocks.size() > canonical_.size()) {
    invariant_fail("replica of node " + std::to_string(node.id.value) +
                   " is ahead of the committed chain");
    return;
  }
  for (size_t h = 0; h < blocks.size(); ++h) {
    if (blocks[h].d_hash != canonical_[h]) {
      invariant_fail("replica of node " + std::to_string(node.id.value) +
                     " diverges at height " + std::to_string(h));
      return;
    }
  }
}

ActorState& Runner::actor(const std::string& label) {
  auto it = actors_.find(label);
  if (it == actors_.end()) fail(Errc::not_found, "unknown actor " + label);
  return it->second;
}

ActorState* Runner::patient_for_obj(const ObjectId& obj) {
  for (auto& [label, a] : actors_) {
    if (a.spec.role == emr::Role::patient && a.obj == obj) return &a;
  }
  return nullptr;
}

void Runner::setup_nodes() {
  registry_.params = params_;
  std::vector<NodeId> ids;
  nodes_.reserve(scenario_.node_count);
  for (int i = 0; i < scenario_.node_count; ++i) {
    SimNode node;
    node.id = NodeId{static_cast<uint32_t>(i)};
    node.keys = emr::acct_keygen(params_, emr::Role::node, master_);
    registry_.node_pk[node.id] = node.keys.y;
    ids.push_back(node.id);
    nodes_.push_back(std::move(node));
  }
  credits_ = dpos::CreditTable(ids, credit_config_.initial);

  for (const Fault& f : scenario_.faults) {
    if (f.kind == FaultKind::byzantine_audit) {
      nodes_[f.node.value].byz_from = f.from;
      nodes_[f.node.value].byz_until = f.until;
      consensus_log("byzantine-audit node=" + std::to_string(f.node.value) +
                    " from=" + std::to_string(f.from) + " until=" + std::to_string(f.until));
    }
  }

  for (SimNode& node : nodes_) {
    SimNode* n = &node;
    sim_.register_node(node.id,
                       [this, n](NodeId from, ByteView payload) { node_handle(*n, from, payload); });
  }
}

void Runner::setup_actors() {
  uint32_t next_endpoint = kEndpointBase;
  for (const ActorSpec& spec : scenario_.actors) {
    ActorState a;
    a.spec = spec;
    a.keys = emr::acct_keygen(params_, spec.role, master_);
    a.endpoint = NodeId{next_endpoint++};
    if (spec.role == emr::Role::patient) {
      a.obj.bytes = a.keys.id().bytes;
    }
    actor_order_.push_back(spec.label);
    actors_.emplace(spec.label, std::move(a));
  }
  for (const std::string& label : actor_order_) {
    ActorState& a = actors_.at(label);
    ActorState* ap = &a;
    sim_.register_node(a.endpoint, [this, ap](NodeId from, ByteView payload) {
      endpoint_handle(*ap, from, payload);
    });
    if (a.spec.role == emr::Role::patient) {
      contracts_.emplace(label, contract::Contract(a.obj, a.keys.public_key(), master_.fork()));
    }
  }
}

void Runner::schedule_cycle(Time start) {
  for (int slot = 0; slot < dpos::kRpnCount; ++slot) {
    uint64_t gslot = schedule_.cycle * dpos::kRpnCount + static_cast<uint64_t>(slot);
    sim_.schedule_at(schedule_.slot_start(slot), "slot", [this, gslot] { on_slot(gslot); });
  }
  Time boundary = start + dpos::kCycleMs;
  if (boundary <= scenario_.end_time) {
    sim_.schedule_at(boundary, "cycle", [this, boundary] { on_cycle_boundary(boundary); });
  }
}

void Runner::setup() {
  setup_nodes();
  setup_actors();

  schedule_ = dpos::elect(credits_, credit_config_, 0, 0);
  schedules_.push_back(schedule_);
  consensus_log("elect t=0 cycle=0");
  consensus_log("rpn " + join_nodes(schedule_.rpn));
  consensus_log("atn " + join_nodes(schedule_.atn));
  schedule_cycle(0);

  for (const Fault& f : scenario_.faults) {
    if (f.kind == FaultKind::crash) {
      sim_.schedule_at(f.at, "crash", [this, f] {
        nodes_[f.node.value].alive = false;
        consensus_log("crash t=" + std::to_string(sim_.now()) +
                      " node=" + std::to_string(f.node.value));
      });
    } else if (f.kind == FaultKind::recover) {
      sim_.schedule_at(f.at, "recover", [this, f] {
        SimNode& node = nodes_[f.node.value];
        node.alive = true;
        node.replica = committed_;
        consensus_log("recover t=" + std::to_string(sim_.now()) +
                      " node=" + std::to_string(f.node.value) +
                      " height=" + std::to_string(node.replica.height_count()));
      });
    }
  }

  for (const TimelineEvent& e : scenario_.timeline) {
    const TimelineEvent* ev = &e;
    sim_.schedule_at(e.t, std::string("ev-") + event_kind_name(e.kind),
                     [this, ev] { run_timeline_event(*ev); });
  }

  sim_.set_post_event_hook([this] {
    if (nodes_.empty()) return;
    const SimNode& probe = nodes_[probe_cursor_ % nodes_.size()];
    ++probe_cursor_;
    if (probe.alive) check_replica(probe);
  });
}

void Runner::on_slot(uint64_t gslot) {
  int slot = static_cast<int>(gslot % dpos::kRpnCount);
  NodeId producer = schedule_.producer_for_slot(slot);
  Time now = sim_.now();
  SimNode& node = nodes_[producer.value];

  if (!node.alive) {
    ++missed_slots_;
    consensus_log("missed-slot t=" + std::to_string(now) + " slot=" + std::to_string(gslot) +
                  " node=" + std::to_string(producer.value));
    credit(producer, dpos::CreditKind::missed_slot, now);
    return;
  }

  ledger::BuildResult built =
      ledger::build_block(node.keys, producer, mempool_, node.replica.tip(), now);
  consensus_log("build t=" + std::to_string(now) + " slot=" + std::to_string(gslot) +
                " height=" + std::to_string(built.block.height) +
                " producer=" + std::to_string(producer.value) +
                " txs=" + std::to_string(built.block.d_set.size()));

  SlotRound round;
  round.gslot = gslot;
  round.producer = producer;
  round.block = std::move(built.block);
  round.rec = std::move(built.rec);
  rounds_[gslot] = std::move(round);

  ByteWriter w;
  w.u8(kMsgRec);
  w.u64(gslot);
  w.raw(rounds_[gslot].rec);
  sim_.broadcast(producer, schedule_.atn, w.bytes(), "rec");

  sim_.schedule_at(now + kTallyDelayMs, "tally", [this, gslot] { on_tally(gslot); });
}

void Runner::handle_rec(SimNode& node, ByteView body) {
  ByteReader r(body);
  uint64_t gslot = r.u64();
  Bytes rec = r.raw(r.remaining());
  if (gslot / dpos::kRpnCount != schedule_.cycle) return;
  if (!schedule_.is_auditor(node.id)) return;

  int slot = static_cast<int>(gslot % dpos::kRpnCount);
  NodeId expected = schedule_.producer_for_slot(slot);
  Time now = sim_.now();

  ledger::Endorsement e =
      dpos::audit_block(rec, node.replica.tip(), registry_, expected, node.keys, now);
  if (node.byzantine_at(now)) {
    uint8_t res = e.res ? 0 : 1;
    e = dpos::make_endorsement(node.keys, res, res ? 0 : 1, now);
  }
  dpos::AuditReply reply = dpos::seal_reply(e, nodes_[expected.value].keys.public_key(), rng_);

  ByteWriter w;
  w.u8(kMsgReply);
  w.u64(gslot);
  w.raw(reply.ct);
  sim_.send(node.id, expected, w.bytes(), "audit-reply");
}

void Runner::on_tally(uint64_t gslot) {
  auto it = rounds_.find(gslot);
  if (it == rounds_.end()) return;
  SlotRound& round = it->second;
  if (round.resolved) return;
  round.resolved = true;
  Time now = sim_.now();
  SimNode& producer = nodes_[round.producer.value];

  if (!producer.alive) {
    ++missed_slots_;
    consensus_log("missed-slot t=" + std::to_string(now) + " slot=" + std::to_string(gslot) +
                  " node=" + std::to_string(round.producer.value) + " (down at tally)");
    credit(round.producer, dpos::CreditKind::missed_slot, now);
    return;
  }

  dpos::TallyResult tr = dpos::tally(round.replies, registry_, dpos::kAtnCount);
  if (!tr.committed) {
    ++no_commits_;
    consensus_log("no-commit t=" + std::to_string(now) + " slot=" + std::to_string(gslot) +
                  " approvals=" + std::to_string(tr.approvals));
    for (const ledger::TimedTx& timed : round.block.d_set) {
      mempool_.force_enqueue(timed.tx, timed.admitted);
    }
    for (const ledger::Endorsement& e : tr.endorsements) {
      NodeId auditor{0};
      for (const SimNode& n : nodes_) {
        if (n.keys.y == e.pk_atn) auditor = n.id;
      }
      credit(auditor,
             e.res == 0 ? dpos::CreditKind::correct_audit : dpos::CreditKind::incorrect_audit,
             now);
    }
    return;
  }

  ledger::Block block = round.block;
  block.endorsements = tr.endorsements;

  ledger::append_block(producer.replica, block, registry_, dpos::kAtnCount);
  committed_.blocks.push_back(block);
  canonical_.push_back(block.d_hash);
  commit_times_.push_back(now);
  consensus_log("commit t=" + std::to_string(now) + " height=" + std::to_string(block.height) +
                " producer=" + std::to_string(round.producer.value) +
                " approvals=" + std::to_string(tr.approvals) +
                " txs=" + std::to_string(block.d_set.size()) +
                " d_hash=" + to_hex(ByteView(block.d_hash.data(), 8)));

  credit(round.producer, dpos::CreditKind::produced_block, now);
  for (const ledger::Endorsement& e : tr.endorsements) {
    NodeId auditor{0};
    for (const SimNode& n : nodes_) {
      if (n.keys.y == e.pk_atn) auditor = n.id;
    }
    credit(auditor,
           e.res == 1 ? dpos::CreditKind::correct_audit : dpos::CreditKind::incorrect_audit,
           now);
  }

  ByteWriter w;
  w.u8(kMsgCommit);
  w.u64(gslot);
  w.raw(block.serialize());
  std::vector<NodeId> others;
  others.reserve(nodes_.size() - 1);
  for (const SimNode& n : nodes_) {
    if (!(n.id == round.producer)) others.push_back(n.id);
  }
  sim_.broadcast(round.producer, others, w.bytes(), "commit");

  process_committed(block, round.producer, now);
}

void Runner::handle_commit(SimNode& node, ByteView body) {
  ByteReader r(body);
  r.u64();
  Bytes block_bytes = r.raw(r.remaining());
  ledger::Block block = ledger::Block::deserialize(block_bytes);
  if (block.height != node.replica.height_count()) return;  // stale or duplicate
  uint64_t height = block.height;
  try {
    ledger::append_block(node.replica, std::move(block), registry_, dpos::kAtnCount);
  } catch (const Error& e) {
    invariant_fail("replica " + std::to_string(node.id.value) + " rejects commit at height " +
                   std::to_string(height) + ": " + e.what());
    return;
  }
  check_replica(node);
}

void Runner::process_committed(const ledger::Block& block, NodeId producer, Time now) {
  for (const ledger::TimedTx& timed : block.d_set) {
    if (const auto* rel = std::get_if<ledger::ReleaseTx>(&timed.tx)) {
      std::string key = to_hex(ByteView(rel->index_hash.data(), rel->index_hash.size()));
      auto it = pending_release_.find(key);
      if (it == pending_release_.end()) continue;
      ActorState& patient = actor(it->second.patient);
      try {
        contracts_.at(it->second.patient)
            .deposit_index(it->second.part, rel->index_ct, *rel);
        summary_log("deposit t=" + std::to_string(now) + " obj=" + patient.obj.hex() +
                    " part=" + std::to_string(it->second.part));
      } catch (const Error& e) {
        summary_log("deposit-failed t=" + std::to_string(now) + " obj=" + patient.obj.hex() +
                    " part=" + std::to_string(it->second.part) + " : " + e.what());
      }
      pending_release_.erase(it);
    } else if (const auto* acc = std::get_if<ledger::AccessTx>(&timed.tx)) {
      std::string key = acc->requester.hex() + "/" + acc->obj.hex() + "/" +
                        std::to_string(acc->i) + "/" + std::to_string(acc->t);
      auto it = pending_access_.find(key);
      if (it == pending_access_.end()) continue;
      PendingAccess pending = it->second;
      pending_access_.erase(it);

      ActorState* patient = patient_for_obj(acc->obj);
      ActorState& requester = actor(pending.requester);
      if (patient == nullptr) continue;
      contract::Contract& c = contracts_.at(patient->spec.label);
      contract::Outcome outcome = contract::Denial{"unprocessed"};
      try {
        outcome = c.handle_request(*acc, requester.keys.public_key(), pending.action, now);
      } catch (const Error& e) {
        outcome = contract::Denial{e.what()};
      }

      ByteWriter w;
      w.u8(kMsgOutcome);
      w.u32(static_cast<uint32_t>(acc->i));
      w.str(pending.retrieval_key);
      if (const auto* msg = std::get_if<contract::Message>(&outcome)) {
        w.u8(1);
        w.block(msg->ct);
      } else {
        w.u8(0);
        w.str(std::get<contract::Denial>(outcome).why);
      }
      sim_.send(producer, requester.endpoint, w.bytes(), "access-outcome");
    }
  }
}

void Runner::node_handle(SimNode& node, NodeId from, ByteView payload) {
  (void)from;
  if (!node.alive || payload.empty()) return;
  ByteReader r(payload);
  uint8_t kind = r.u8();
  Bytes body = r.raw(r.remaining());
  switch (kind) {
    case kMsgSubmitRelease: {
      ledger::ReleaseTx tx = ledger::ReleaseTx::deserialize(body);
      ledger::Admission a = mempool_.submit(tx, sim_.now());
      if (a != ledger::Admission::queued) {
        consensus_log("tx-rejected t=" + std::to_string(sim_.now()) + " kind=release reason=" +
                      ledger::admission_name(a));
      }
      break;
    }
    case kMsgSubmitAccess: {
      ledger::AccessTx tx = ledger::AccessTx::deserialize(body);
      ledger::Admission a = mempool_.submit(tx, sim_.now());
      if (a != ledger::Admission::queued) {
        consensus_log("tx-rejected t=" + std::to_string(sim_.now()) + " kind=access reason=" +
                      ledger::admission_name(a));
      }
      break;
    }
    case kMsgRec:
      handle_rec(node, body);
      break;
    case kMsgReply: {
      ByteReader rr(body);
      uint64_t gslot = rr.u64();
      Bytes ct = rr.raw(rr.remaining());
      auto it = rounds_.find(gslot);
      if (it == rounds_.end() || it->second.resolved) break;
      if (!(it->second.producer == node.id)) break;
      try {
        it->second.replies.push_back(dpos::open_reply(node.keys, dpos::AuditReply{ct}));
      } catch (const Error&) {
        consensus_log("reply-discarded t=" + std::to_string(sim_.now()) +
                      " slot=" + std::to_string(gslot));
      }
      break;
    }
    case kMsgCommit:
      handle_commit(node, body);
      break;
    default:
      break;
  }
}

void Runner::endpoint_handle(ActorState& a, NodeId from, ByteView payload) {
  (void)from;
  if (payload.empty()) return;
  ByteReader r(payload);
  uint8_t kind = r.u8();
  if (kind == kMsgEnvelope) {
    Bytes doctor_id = r.raw(16);
    Bytes env_bytes = r.raw(r.remaining());
    emr::InfoEnvelope envelope = emr::InfoEnvelope::deserialize(env_bytes);
    emr::OpenedInfo info = emr::open_info(a.keys, envelope);

    const ces::CesPublicKey* ces_pk = nullptr;
    for (const std::string& label : actor_order_) {
      ActorState& other = actors_.at(label);
      AccountId id = other.keys.id();
      if (Bytes(id.bytes.begin(), id.bytes.end()) == doctor_id && other.ces_pk) {
        ces_pk = &*other.ces_pk;
      }
    }
    bool verified =
        ces_pk != nullptr && ces::verify_full(*ces_pk, info.emr.parts, info.sig);
    if (verified) {
      a.info = std::move(info);
      a.ces_pk = *ces_pk;
    }
    summary_log("visit t=" + std::to_string(sim_.now()) + " patient=" + a.spec.label +
                " verified=" + (verified ? "true" : "false"));
    return;
  }
  if (kind == kMsgOutcome) {
    int part = static_cast<int>(r.u32());
    std::string retrieval_key = r.str();
    uint8_t granted = r.u8();
    auto it = retrievals_.find(retrieval_key);
    if (it == retrievals_.end()) return;
    Retrieval& retrieval = it->second;

    if (!granted) {
      std::string why = r.str();
      retrieval.failed = true;
      summary_log("request t=" + std::to_string(retrieval.event_t) +
                  " requester=" + retrieval.requester + " part=" + std::to_string(part) +
                  " denied: " + why);
      verify_results_[retrieval_key] = false;
      return;
    }

    Bytes ct = r.block();
    auto [index_bytes, granted_at] = contract::open_message(a.keys, contract::Message{ct});
    emr::EmrIndex index = emr::EmrIndex::deserialize(index_bytes);
    summary_log("index t=" + std::to_string(sim_.now()) + " requester=" + retrieval.requester +
                " part=" + std::to_string(part) + " granted_at=" + std::to_string(granted_at));

    cloud::AttributeKey key{a.keys.id(), a.spec.attributes};
    try {
      cloud::RetrievedPart fetched = cloud_.retrieve(index.url, key, sim_);
      retrieval.received.emplace(part, std::move(fetched));
      summary_log("retrieve t=" + std::to_string(sim_.now()) +
                  " requester=" + retrieval.requester + " part=" + std::to_string(part) +
                  " url=" + index.url);
    } catch (const Error& e) {
      retrieval.failed = true;
      summary_log("retrieve t=" + std::to_string(sim_.now()) +
                  " requester=" + retrieval.requester + " part=" + std::to_string(part) +
                  " denied: " + e.what());
      verify_results_[retrieval_key] = false;
    }

    if (!retrieval.failed && retrieval.received.size() == retrieval.parts.size()) {
      finish_retrieval(retrieval);
    }
  }
}

void Runner::finish_retrieval(Retrieval& r) {
  ActorState& patient = actor(r.patient);
  if (!patient.ces_pk) return;

  ces::PartMap m_prime;
  for (const auto& [part, fetched] : r.received) m_prime[part] = fetched.m;

  // Prefer the esig whose extraction set is exactly the retrieved set;
  // verify each part's own esig against its sub-map otherwise.
  bool verified = false;
  bool exact = false;
  for (const auto& [part, fetched] : r.received) {
    if (fetched.esig.ci == r.parts) {
      exact = true;
      verified = ces::verify_extracted(*patient.ces_pk, m_prime, fetched.esig);
      break;
    }
  }
  if (!exact) {
    verified = true;
    for (const auto& [part, fetched] : r.received) {
      ces::PartMap sub;
      bool complete = true;
      for (int idx : fetched.esig.ci) {
        auto it = m_prime.find(idx);
        if (it == m_prime.end()) {
          complete = false;
          break;
        }
        sub[idx] = it->second;
      }
      if (!complete || !ces::verify_extracted(*patient.ces_pk, sub, fetched.esig)) {
        verified = false;
        break;
      }
    }
  }

  std::string key = patient.obj.hex() + "/" + std::to_string(r.event_t);
  verify_results_[key] = verified;
  summary_log("request t=" + std::to_string(r.event_t) + " requester=" + r.requester +
              " parts=" + join_ints(r.parts) + " verify_extracted=" +
              (verified ? "true" : "false"));
}

void Runner::run_timeline_event(const TimelineEvent& e) {
  switch (e.kind) {
    case EventKind::visit: do_visit(e); break;
    case EventKind::release: do_release(e); break;
    case EventKind::grant: do_grant(e); break;
    case EventKind::revoke: do_revoke(e); break;
    case EventKind::request: do_request(e); break;
  }
}

void Runner::do_visit(const TimelineEvent& e) {
  ActorState& doctor = actor(e.doctor);
  ActorState& patient = actor(e.patient);
  Time now = sim_.now();

  emr::EmrDocument doc;
  for (int i = 1; i <= ces::kParts; ++i) {
    std::string text;
    if (!e.parts_text.empty()) {
      text = e.parts_text[static_cast<size_t>(i - 1)];
    } else {
      text = std::string(emr::EmrDocument::part_names()[static_cast<size_t>(i - 1)]) + " of " +
             e.patient + " by " + e.doctor + " at t=" + std::to_string(now);
    }
    doc.parts[static_cast<size_t>(i - 1)] = to_bytes(text);
  }
  doc.validate();

  ces::CesKeyPair ces_kp = ces::keygen(params_, rng_);
  doctor.ces_pk = ces_kp.public_key();
  ces::CesTag tag = ces::CesTag::random(rng_);
  ces::FullSignature sig = ces::sign(ces_kp, doc.parts, scenario_.ceas, tag, rng_);

  std::array<Bigint, ces::kParts> digests;
  for (int i = 1; i <= ces::kParts; ++i) {
    digests[static_cast<size_t>(i - 1)] = ces::hash_submessage(
        doc.parts[static_cast<size_t>(i - 1)], scenario_.ceas, tag, i, params_.p);
  }

  SymKey k_doc = SymKey::random(rng_);
  emr::InfoEnvelope envelope = emr::package_info(k_doc, patient.keys.public_key(), doc,
                                                 digests, sig, scenario_.ceas, tag, rng_);
  ByteWriter w;
  w.u8(kMsgEnvelope);
  AccountId did = doctor.keys.id();
  w.raw(ByteView(did.bytes.data(), did.bytes.size()));
  w.raw(envelope.serialize());
  sim_.send(doctor.endpoint, patient.endpoint, w.bytes(), "info-envelope");
  summary_log("visit-sent t=" + std::to_string(now) + " doctor=" + e.doctor +
              " patient=" + e.patient);
}

void Runner::do_release(const TimelineEvent& e) {
  ActorState& patient = actor(e.patient);
  Time now = sim_.now();
  if (!patient.info) {
    summary_log("release t=" + std::to_string(now) + " patient=" + e.patient +
                " skipped: no verified record");
    return;
  }
  contract::Contract& c = contracts_.at(e.patient);
  const emr::OpenedInfo& info = *patient.info;

  for (int part : e.parts) {
    std::vector<int> keep = scenario_.ceas.indices();
    if (!scenario_.ceas.contains(part)) {
      keep.push_back(part);
      std::sort(keep.begin(), keep.end());
    }
    auto [kept, esig] = ces::extract(*patient.ces_pk, info.emr.parts, info.sig, keep);

    const Bytes& m = info.emr.parts[static_cast<size_t>(part - 1)];
    const Bigint& h = info.digests[static_cast<size_t>(part - 1)];
    std::string url =
        cloud_.store(patient.keys.id(), part, m, h, info.tag, scenario_.policy, esig, sim_);

    emr::EmrIndex index = emr::build_index(url, h, sim_);
    Bytes index_bytes = index.serialize();

    ledger::ReleaseTx tx;
    tx.index_ct = emr::asym_encrypt(c.delegate_pk(), index_bytes, rng_);
    tx.index_hash = sha256(index_bytes);
    tx.signer_pk = patient.keys.y;
    tx.sig = emr::acct_sign_digest(patient.keys, tx.index_hash);
    tx.t = now;

    pending_release_[to_hex(ByteView(tx.index_hash.data(), tx.index_hash.size()))] = {
        e.patient, part};

    ByteWriter w;
    w.u8(kMsgSubmitRelease);
    w.raw(tx.serialize());
    sim_.send(patient.endpoint, current_producer(), w.bytes(), "submit-release");
  }
  summary_log("release t=" + std::to_string(now) + " patient=" + e.patient +
              " parts=" + join_ints(e.parts));
}

void Runner::do_grant(const TimelineEvent& e) {
  ActorState& patient = actor(e.patient);
  ActorState& grantee = actor(e.grantee);
  Time now = sim_.now();

  contract::PermissionGrant grant;
  grant.grantee = grantee.keys.id();
  grant.part_indices = e.parts;
  grant.actions = e.actions;
  std::sort(grant.actions.begin(), grant.actions.end());
  grant.actions.erase(std::unique(grant.actions.begin(), grant.actions.end()),
                      grant.actions.end());
  grant.valid_from = e.from;
  grant.valid_until = e.until;

  contract::SignedCommand cmd =
      contract::sign_command(patient.keys, contract::encode_grants({grant}));
  contracts_.at(e.patient).set_permissions(cmd, now);
  summary_log("grant t=" + std::to_string(now) + " patient=" + e.patient +
              " grantee=" + e.grantee + " parts=" + join_ints(e.parts) +
              " window=[" + std::to_string(e.from) + "," + std::to_string(e.until) + "]");
}

void Runner::do_revoke(const TimelineEvent& e) {
  ActorState& patient = actor(e.patient);
  ActorState& grantee = actor(e.grantee);
  Time now = sim_.now();
  AccountId gid = grantee.keys.id();
  Bytes payload(gid.bytes.begin(), gid.bytes.end());
  contracts_.at(e.patient).revoke(contract::sign_command(patient.keys, payload), now);
  summary_log("revoke t=" + std::to_string(now) + " patient=" + e.patient +
              " grantee=" + e.grantee);
}

void Runner::do_request(const TimelineEvent& e) {
  ActorState& requester = actor(e.requester);
  ActorState& patient = actor(e.patient);
  Time now = sim_.now();

  std::string retrieval_key = patient.obj.hex() + "/" + std::to_string(now);
  Retrieval retrieval;
  retrieval.requester = e.requester;
  retrieval.patient = e.patient;
  retrieval.parts = e.parts;
  retrieval.event_t = now;
  retrievals_[retrieval_key] = std::move(retrieval);

  for (int part : e.parts) {
    ledger::AccessTx tx;
    tx.requester = requester.keys.id();
    tx.obj = patient.obj;
    tx.i = part;
    tx.t = now;

    std::string key = tx.requester.hex() + "/" + tx.obj.hex() + "/" + std::to_string(part) +
                      "/" + std::to_string(now);
    pending_access_[key] = {e.action, retrieval_key, e.requester};

    ByteWriter w;
    w.u8(kMsgSubmitAccess);
    w.raw(tx.serialize());
    sim_.send(requester.endpoint, current_producer(), w.bytes(), "submit-access");
  }
  summary_log("request-sent t=" + std::to_string(now) + " requester=" + e.requester +
              " patient=" + e.patient + " parts=" + join_ints(e.parts) +
              " action=" + contract::action_name(e.action));
}

void Runner::on_cycle_boundary(Time t) {
  schedule_ = dpos::cycle_readjust(credits_, credit_config_, t);
  schedules_.push_back(schedule_);
  readjust_times_.push_back(t);
  consensus_log("readjust t=" + std::to_string(t) +
                " cycle=" + std::to_string(schedule_.cycle));
  consensus_log("rpn " + join_nodes(schedule_.rpn));
  consensus_log("atn " + join_nodes(schedule_.atn));
  schedule_cycle(t);
}

void Runner::build_artifacts(RunOutput& out) {
  ledger::Chain artifact_chain = committed_;
  if (scenario_.tamper_height) {
    uint64_t h = *scenario_.tamper_height;
    if (h >= artifact_chain.blocks.size()) {
      invariant_fail("tamper height " + std::to_string(h) + " beyond chain tip");
    } else {
      artifact_chain.blocks[h].d_hash[0] ^= 0x01;
      summary_log("tamper height=" + std::to_string(h) + " applied to artifact chain");
    }
  }

  nlohmann::json manifest;
  manifest["name"] = scenario_.name;
  manifest["profile"] = scenario_.profile;
  manifest["seed"] = scenario_.seed;
  manifest["node_count"] = scenario_.node_count;
  manifest["initial_credit"] = scenario_.initial_credit;
  manifest["rpn"] = dpos::kRpnCount;
  manifest["atn"] = dpos::kAtnCount;
  manifest["end_time"] = scenario_.end_time;

  std::string credits_text;
  for (const auto& [id, score] : credits_.ranked()) {
    credits_text +=
        "node=" + std::to_string(id.value) + " score=" + std::to_string(score) + "\n";
  }

  std::string execution_text;
  for (const std::string& label : actor_order_) {
    const ActorState& a = actors_.at(label);
    if (a.spec.role != emr::Role::patient) continue;
    execution_text += "# obj=" + a.obj.hex() + " patient=" + label + "\n";
    execution_text += contracts_.at(label).dump_log();
  }

  std::string trace_text;
  for (const std::string& line : sim_.trace()) trace_text += line + "\n";
  std::string consensus_text;
  for (const std::string& line : consensus_lines_) consensus_text += line + "\n";

  std::string actors_text;
  for (const std::string& label : actor_order_) {
    const ActorState& a = actors_.at(label);
    actors_text += "label=" + label + " role=" + emr::role_name(a.spec.role) +
                   " id=" + a.keys.id().hex() +
                   " endpoint=" + std::to_string(a.endpoint.value) +
                   " pk=" + to_hex(bigint_to_bytes(a.keys.y)) + "\n";
  }

  std::string summary_text;
  summary_text += "scenario=" + scenario_.name + " seed=" + std::to_string(scenario_.seed) +
                  " profile=" + scenario_.profile + "\n";
  summary_text += "nodes=" + std::to_string(scenario_.node_count) +
                  " end_time=" + std::to_string(scenario_.end_time) + "\n";
  for (const std::string& line : summary_lines_) summary_text += line + "\n";
  summary_text += "commits=" + std::to_string(commit_times_.size()) +
                  " no_commits=" + std::to_string(no_commits_) +
                  " missed_slots=" + std::to_string(missed_slots_) +
                  " readjusts=" + std::to_string(readjust_times_.size()) +
                  " chain_height=" + std::to_string(committed_.blocks.size()) + "\n";
  summary_text += std::string("invariants=") + (ok_ ? "ok" : ("FAIL " + failure_)) + "\n";

  auto text_bytes = [](const std::string& s) { return Bytes(s.begin(), s.end()); };
  std::string manifest_text = manifest.dump(2) + "\n";

  out.files = {
      {"manifest.json", text_bytes(manifest_text)},
      {"chain.bin", artifact_chain.serialize()},
      {"chain.txt", text_bytes(ledger::dump_chain(artifact_chain))},
      {"registry.bin", registry_.serialize()},
      {"credits.txt", text_bytes(credits_text)},
      {"access_log.txt", text_bytes(cloud_.dump_log())},
      {"execution_log.txt", text_bytes(execution_text)},
      {"net_trace.txt", text_bytes(trace_text)},
      {"consensus_events.txt", text_bytes(consensus_text)},
      {"actors.txt", text_bytes(actors_text)},
      {"summary.txt", text_bytes(summary_text)},
  };
}

RunOutput Runner::run() {
  setup();
  sim_.run_until(scenario_.end_time);

  for (const SimNode& node : nodes_) {
    if (node.alive) check_replica(node);
  }
  ledger::ChainVerifyResult cv = ledger::chain_verify(committed_, registry_, dpos::kAtnCount);
  if (!cv.ok) {
    invariant_fail("committed chain fails verification at height " +
                   std::to_string(cv.first_invalid) + ": " + cv.reason);
  }

  RunOutput out;
  build_artifacts(out);
  out.ok = ok_;
  out.failure = failure_;
  out.chain = committed_;
  out.registry = registry_;
  out.credits = credits_;
  out.credit_events = credit_events_;
  out.schedules = schedules_;
  out.commit_times = commit_times_;
  out.readjust_times = readjust_times_;
  out.missed_slots = missed_slots_;
  out.no_commits = no_commits_;
  out.verify_extracted = verify_results_;
  for (const SimNode& node : nodes_) {
    ReplicaSummary r;
    r.id = node.id;
    r.alive = node.alive;
    r.height = node.replica.height_count();
    r.chain_digest = sha256(node.replica.serialize());
    out.replicas.push_back(r);
  }
  return out;
}

}  // namespace

RunOutput run_scenario(const Scenario& scenario) {
  scenario.validate();
  Runner runner(scenario);
  return runner.run();
}

const std::vector<std::string>& artifact_names() {
  static const std::vector<std::string> names = {
      "manifest.json",  "chain.bin",    "chain.txt",          "registry.bin",
      "credits.txt",    "access_log.txt", "execution_log.txt", "net_trace.txt",
      "consensus_events.txt", "actors.txt", "summary.txt",
  };
  return names;
}

void write_artifacts(const RunOutput& out, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, bytes] : out.files) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::not_found, "cannot write artifact " + name + " in " + dir);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  }
}

namespace {

std::optional<Bytes> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream buf;
  buf << f.rdbuf();
  std::string s = buf.str();
  return Bytes(s.begin(), s.end());
}

std::vector<std::string> split_lines(const Bytes& data) {
  std::vector<std::string> lines;
  std::string current;
  for (uint8_t b : data) {
    if (b == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(static_cast<char>(b));
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

}  // namespace

int verify_artifacts(const std::string& dir, std::ostream& out) {
  std::filesystem::path base(dir);
  std::map<std::string, Bytes> files;
  for (const std::string& name : artifact_names()) {
    auto data = read_file(base / name);
    if (!data) {
      out << "missing artifact: " << name << "\n";
      return 4;
    }
    files[name] = std::move(*data);
  }

  nlohmann::json manifest =
      nlohmann::json::parse(files["manifest.json"], nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    out << "manifest.json is not valid JSON\n";
    return 3;
  }

  ledger::ValidatorRegistry registry;
  ledger::Chain chain;
  try {
    registry = ledger::ValidatorRegistry::deserialize(files["registry.bin"]);
    chain = ledger::Chain::deserialize(files["chain.bin"]);
  } catch (const Error& e) {
    out << "artifact decode failed: " << e.what() << "\n";
    return 3;
  }

  int atn = manifest.value("atn", dpos::kAtnCount);
  ledger::ChainVerifyResult cv = ledger::chain_verify(chain, registry, atn);
  if (!cv.ok) {
    out << "chain invalid at height " << cv.first_invalid << ": " << cv.reason << "\n";
    return 3;
  }

  std::string expected_dump = ledger::dump_chain(chain);
  Bytes expected_bytes(expected_dump.begin(), expected_dump.end());
  if (expected_bytes != files["chain.txt"]) {
    std::vector<std::string> want = split_lines(expected_bytes);
    std::vector<std::string> got = split_lines(files["chain.txt"]);
    size_t h = 0;
    while (h < want.size() && h < got.size() && want[h] == got[h]) ++h;
    out << "chain dump mismatch at height " << h << "\n";
    return 3;
  }

  // Credit table re-derivation from the logged credit events.
  int node_count = manifest.value("node_count", 0);
  int initial = manifest.value("initial_credit", 100);
  if (node_count > 0) {
    std::vector<NodeId> ids;
    for (int i = 0; i < node_count; ++i) ids.push_back(NodeId{static_cast<uint32_t>(i)});
    dpos::CreditTable table(ids, initial);
    dpos::CreditConfig config;
    config.initial = initial;
    try {
      for (const std::string& line : split_lines(files["consensus_events.txt"])) {
        if (line.rfind("credit ", 0) != 0) continue;
        std::istringstream ss(line);
        std::string word, node_field, kind_field;
        ss >> word >> word >> node_field >> kind_field;
        uint32_t node = static_cast<uint32_t>(std::stoul(node_field.substr(5)));
        std::string kind_name = kind_field.substr(5);
        dpos::CreditKind kind;
        if (kind_name == "produced-block") kind = dpos::CreditKind::produced_block;
        else if (kind_name == "correct-audit") kind = dpos::CreditKind::correct_audit;
        else if (kind_name == "missed-slot") kind = dpos::CreditKind::missed_slot;
        else if (kind_name == "incorrect-audit") kind = dpos::CreditKind::incorrect_audit;
        else {
          out << "unknown credit kind in consensus_events.txt: " << kind_name << "\n";
          return 3;
        }
        table.apply({NodeId{node}, kind, 0}, config);
      }
    } catch (const std::exception& e) {
      out << "consensus_events.txt is malformed: " << e.what() << "\n";
      return 3;
    }
    std::string derived;
    for (const auto& [id, score] : table.ranked()) {
      derived += "node=" + std::to_string(id.value) + " score=" + std::to_string(score) + "\n";
    }
    if (Bytes(derived.begin(), derived.end()) != files["credits.txt"]) {
      out << "credit table does not match the logged credit events\n";
      return 3;
    }
  }

  out << "ok: chain height " << chain.blocks.size() << ", artifacts consistent\n";
  return 0;
}

}  // namespace bpds::sim
