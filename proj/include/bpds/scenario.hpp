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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bpds/ces.hpp"
#include "bpds/contract.hpp"
#include "bpds/emr.hpp"
#include "bpds/netsim.hpp"
#include "bpds/policy.hpp"

namespace bpds::sim {

enum class EventKind : uint8_t { visit, release, grant, revoke, request };

const char* event_kind_name(EventKind kind);

/// One scripted step of the workflow timeline. Only the fields that the
/// kind uses are meaningful; the rest stay defaulted.
struct TimelineEvent {
  Time t = 0;
  EventKind kind = EventKind::visit;
  std::string doctor;     // visit
  std::string patient;    // all kinds
  std::string grantee;    // grant, revoke
  std::string requester;  // request
  std::vector<int> parts;                   // release, grant, request
  std::vector<contract::Action> actions;    // grant
  contract::Action action = contract::Action::read;  // request
  Time from = 0;          // grant window
  Time until = 0;
  std::vector<std::string> parts_text;  // visit override: exactly 7 when present
};

enum class FaultKind : uint8_t { crash, recover, byzantine_audit };

const char* fault_kind_name(FaultKind kind);

struct Fault {
  FaultKind kind = FaultKind::crash;
  NodeId node;
  Time at = 0;     // crash, recover
  Time from = 0;   // byzantine window, inclusive
  Time until = 0;  // byzantine window, exclusive
};

struct ActorSpec {
  std::string label;
  emr::Role role = emr::Role::user;
  std::set<std::string> attributes;
};

/// Parsed run configuration: actors, consortium size, CEAS, storage
/// policy, the event timeline, and the fault script.
struct Scenario {
  std::string name;
  std::string profile = "test";  // test | production
  uint64_t seed = 1;
  Time end_time = 300000;
  net::NetConfig net;
  int node_count = 50;
  int initial_credit = 100;
  ces::Ceas ceas{{2, 3, 5}};
  cloud::AccessPolicy policy = cloud::AccessPolicy::leaf("medical");
  std::vector<ActorSpec> actors;
  std::vector<TimelineEvent> timeline;
  std::vector<Fault> faults;
  std::optional<uint64_t> tamper_height;  // post-commit artifact mutation

  GroupParams group() const;
  const ActorSpec* find_actor(const std::string& label) const;

  /// Structural checks: profile known, roster >= 50, labels unique,
  /// every reference resolves to an actor of the right role, the
  /// timeline is time-ordered within [0, end_time], fault nodes exist.
  void validate() const;

  /// Parses the JSON text. Unknown fields and type mismatches are parse
  /// errors; validate() runs on the result.
  static Scenario from_json_text(const std::string& text);
  static Scenario load(const std::string& path);
};

}  // namespace bpds::sim
