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

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bpds/dpos.hpp"
#include "bpds/scenario.hpp"

namespace bpds::sim {

/// Time from a slot's start to its audit tally; replies arriving later
/// are ignored. Chosen inside the 10 s slot so commits never collide
/// with the next build.
inline constexpr Time kTallyDelayMs = 9000;

struct ReplicaSummary {
  NodeId id;
  bool alive = true;
  uint64_t height = 0;
  Digest chain_digest{};  // H(serialized replica)
};

/// Everything a finished run exposes: the canonical chain, the artifact
/// payloads (byte-exact, write-ready), and the consensus bookkeeping the
/// property tests assert against.
struct RunOutput {
  bool ok = true;
  std::string failure;

  ledger::Chain chain;  // canonical committed chain (before any tamper)
  ledger::ValidatorRegistry registry;
  dpos::CreditTable credits;                 // final scores
  std::vector<dpos::CreditEvent> credit_events;  // application order
  std::vector<dpos::Schedule> schedules;     // initial election + readjustments
  std::vector<Time> commit_times;
  std::vector<Time> readjust_times;
  int missed_slots = 0;
  int no_commits = 0;
  std::vector<ReplicaSummary> replicas;
  /// request event key "patient-obj-hex/t" -> final extracted-signature
  /// verification over all retrieved parts.
  std::map<std::string, bool> verify_extracted;

  std::vector<std::pair<std::string, Bytes>> files;  // artifact name -> bytes
};

/// Executes the scenario timeline through the full stack. Never touches
/// the filesystem; artifacts come back in RunOutput::files.
RunOutput run_scenario(const Scenario& scenario);

/// Writes every artifact file into dir (created if needed).
void write_artifacts(const RunOutput& out, const std::string& dir);

/// Offline re-check of a written artifact directory: chain signatures,
/// dump consistency, and credit-table re-derivation from the event log.
/// Returns 0 clean, 3 on a violated invariant, 4 on a missing artifact;
/// findings go to `out` one line each.
int verify_artifacts(const std::string& dir, std::ostream& out);

/// Artifact names in write order.
const std::vector<std::string>& artifact_names();

}  // namespace bpds::sim
