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
#include <optional>
#include <string>
#include <vector>

#include "bpds/ces.hpp"
#include "bpds/clock.hpp"
#include "bpds/policy.hpp"
#include "bpds/symcipher.hpp"

namespace bpds::cloud {

enum class LogAction : uint8_t { store, retrieve_granted, retrieve_denied };

const char* log_action_name(LogAction action);

struct AccessLogEntry {
  Time t = 0;
  AccountId actor;
  std::string url;
  LogAction action = LogAction::store;
};

struct LogFilter {
  std::optional<AccountId> actor;
  std::optional<std::string> url;
  std::optional<Time> from;
  std::optional<Time> until;  // inclusive
};

struct RetrievedPart {
  Bytes m;
  Bigint h;
  ces::CesTag tag;
  ces::ExtractedSignature esig;
};

struct StoredTriple {
  Bytes data_ct;      // E_k(M_i || h_i || T)
  Bytes wrapped_key;  // k sealed with the policy bytes under the store key
  ces::ExtractedSignature esig;
  AccessPolicy policy;
  AccountId owner;
  int part_index = 0;
};

/// Emulated CCAC service: a trusted reference monitor that seals each
/// part's document key next to its policy and releases plaintext only to
/// attribute sets the policy accepts. Every store and retrieve (granted
/// or denied) lands in an append-only, time-ordered access log.
class CloudStore {
 public:
  explicit CloudStore(Rng rng);

  /// Encrypts (m || h || tag) under a fresh key, seals the key with the
  /// policy, stores the triple with the extracted signature, logs the
  /// store, and returns the fresh url
  /// "cloud://<owner-hex>/<part-index>/<nonce-hex>".
  std::string store(const AccountId& owner, int part_index, ByteView m, const Bigint& h,
                    const ces::CesTag& tag, const AccessPolicy& policy,
                    const ces::ExtractedSignature& esig, const Clock& clock);

  /// Policy-gated fetch. Grants iff the key's attributes satisfy the
  /// stored policy and the sealed data opens cleanly; logs exactly one
  /// entry either way. Unknown url: not-found. Unsatisfied policy:
  /// access-denied. Corrupted storage: decrypt error (logged as denied).
  RetrievedPart retrieve(const std::string& url, const AttributeKey& key, const Clock& clock);

  /// Time-ordered log entries matching the filter.
  std::vector<AccessLogEntry> audit_log(const LogFilter& filter = {}) const;

  bool exists(const std::string& url) const { return triples_.count(url) > 0; }
  size_t size() const { return triples_.size(); }
  const StoredTriple& triple(const std::string& url) const;

  /// Fault-injection hook for integrity tests: flips one stored byte.
  void corrupt_data(const std::string& url, size_t byte_index, uint8_t mask);

  /// Line-delimited dumps for CLI inspection.
  std::string dump_triples() const;
  std::string dump_log() const;

 private:
  void append_log(Time t, const AccountId& actor, const std::string& url, LogAction action);

  SymKey master_;
  Rng rng_;
  std::map<std::string, StoredTriple> triples_;
  std::vector<AccessLogEntry> log_;
};

}  // namespace bpds::cloud
