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

#include <set>
#include <string>
#include <vector>

#include "bpds/types.hpp"

namespace bpds::cloud {

/// Boolean attribute formula guarding a stored EMR part: leaves name
/// attributes; interior nodes are AND, OR, or k-of-n thresholds.
struct AccessPolicy {
  enum class Kind : uint8_t { leaf, all_of, any_of, threshold };

  Kind kind = Kind::leaf;
  std::string attribute;               // leaf only
  std::vector<AccessPolicy> children;  // interior nodes
  int k = 0;                           // threshold only

  static AccessPolicy leaf(std::string attr);
  static AccessPolicy all_of(std::vector<AccessPolicy> children);
  static AccessPolicy any_of(std::vector<AccessPolicy> children);
  static AccessPolicy k_of(int k, std::vector<AccessPolicy> children);

  /// Leaves non-empty; interior nodes have children; 1 <= k <= n.
  void validate() const;

  /// Text form for dumps, e.g. (a AND (b OR c)) or 2-of(a,b,c).
  std::string render() const;

  Bytes serialize() const;
  static AccessPolicy deserialize(ByteView data);

  bool operator==(const AccessPolicy&) const = default;
};

/// Recursive evaluation: leaf true iff held; AND all; OR any; k-of-n at
/// least k satisfied children.
bool policy_satisfies(const std::set<std::string>& attrs, const AccessPolicy& policy);

/// Attribute possession certificate for one account.
struct AttributeKey {
  AccountId holder;
  std::set<std::string> attributes;

  void validate() const;  // attribute set non-empty
};

}  // namespace bpds::cloud
