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

#include "bpds/policy.hpp"

#include "bpds/codec.hpp"
#include "bpds/errors.hpp"

namespace bpds::cloud {

namespace {

constexpr size_t kMaxPolicyDepth = 32;

void serialize_node(ByteWriter& w, const AccessPolicy& node) {
  w.u8(static_cast<uint8_t>(node.kind));
  if (node.kind == AccessPolicy::Kind::leaf) {
    w.str(node.attribute);
    return;
  }
  if (node.kind == AccessPolicy::Kind::threshold) w.u32(static_cast<uint32_t>(node.k));
  w.u32(static_cast<uint32_t>(node.children.size()));
  for (const AccessPolicy& child : node.children) serialize_node(w, child);
}

AccessPolicy deserialize_node(ByteReader& rd, size_t depth) {
  if (depth > kMaxPolicyDepth) fail(Errc::decode, "policy nesting too deep");
  AccessPolicy node;
  uint8_t kind = rd.u8();
  if (kind > static_cast<uint8_t>(AccessPolicy::Kind::threshold))
    fail(Errc::decode, "unknown policy node kind");
  node.kind = static_cast<AccessPolicy::Kind>(kind);
  if (node.kind == AccessPolicy::Kind::leaf) {
    node.attribute = rd.str();
    return node;
  }
  if (node.kind == AccessPolicy::Kind::threshold) node.k = static_cast<int>(rd.u32());
  uint32_t count = rd.u32();
  if (count == 0 || count > 1024) fail(Errc::decode, "policy child count out of range");
  node.children.reserve(count);
  for (uint32_t i = 0; i < count; ++i) node.children.push_back(deserialize_node(rd, depth + 1));
  return node;
}

}  // namespace

AccessPolicy AccessPolicy::leaf(std::string attr) {
  AccessPolicy node;
  node.kind = Kind::leaf;
  node.attribute = std::move(attr);
  return node;
}

AccessPolicy AccessPolicy::all_of(std::vector<AccessPolicy> children) {
  AccessPolicy node;
  node.kind = Kind::all_of;
  node.children = std::move(children);
  return node;
}

AccessPolicy AccessPolicy::any_of(std::vector<AccessPolicy> children) {
  AccessPolicy node;
  node.kind = Kind::any_of;
  node.children = std::move(children);
  return node;
}

AccessPolicy AccessPolicy::k_of(int k, std::vector<AccessPolicy> children) {
  AccessPolicy node;
  node.kind = Kind::threshold;
  node.k = k;
  node.children = std::move(children);
  return node;
}

void AccessPolicy::validate() const {
  switch (kind) {
    case Kind::leaf:
      if (attribute.empty()) fail(Errc::parameter, "policy leaf attribute is empty");
      return;
    case Kind::all_of:
    case Kind::any_of:
      if (children.empty()) fail(Errc::parameter, "policy node has no children");
      break;
    case Kind::threshold:
      if (children.empty()) fail(Errc::parameter, "policy node has no children");
      if (k < 1 || static_cast<size_t>(k) > children.size())
        fail(Errc::parameter, "policy threshold out of range");
      break;
  }
  for (const AccessPolicy& child : children) child.validate();
}

std::string AccessPolicy::render() const {
  switch (kind) {
    case Kind::leaf:
      return attribute;
    case Kind::all_of:
    case Kind::any_of: {
      std::string sep = kind == Kind::all_of ? " AND " : " OR ";
      std::string out = "(";
      for (size_t i = 0; i < children.size(); ++i) {
        if (i > 0) out += sep;
        out += children[i].render();
      }
      out += ")";
      return out;
    }
    case Kind::threshold: {
      std::string out = std::to_string(k) + "-of(";
      for (size_t i = 0; i < children.size(); ++i) {
        if (i > 0) out += ",";
        out += children[i].render();
      }
      out += ")";
      return out;
    }
  }
  fail(Errc::parameter, "unknown policy node kind");
}

Bytes AccessPolicy::serialize() const {
  ByteWriter w;
  serialize_node(w, *this);
  return w.take();
}

AccessPolicy AccessPolicy::deserialize(ByteView data) {
  ByteReader rd(data);
  AccessPolicy node = deserialize_node(rd, 0);
  rd.expect_done();
  return node;
}

bool policy_satisfies(const std::set<std::string>& attrs, const AccessPolicy& policy) {
  switch (policy.kind) {
    case AccessPolicy::Kind::leaf:
      return attrs.count(policy.attribute) > 0;
    case AccessPolicy::Kind::all_of:
      for (const AccessPolicy& child : policy.children) {
        if (!policy_satisfies(attrs, child)) return false;
      }
      return true;
    case AccessPolicy::Kind::any_of:
      for (const AccessPolicy& child : policy.children) {
        if (policy_satisfies(attrs, child)) return true;
      }
      return false;
    case AccessPolicy::Kind::threshold: {
      int satisfied = 0;
      for (const AccessPolicy& child : policy.children) {
        if (policy_satisfies(attrs, child)) ++satisfied;
      }
      return satisfied >= policy.k;
    }
  }
  return false;
}

void AttributeKey::validate() const {
  if (attributes.empty()) fail(Errc::parameter, "attribute set is empty");
  for (const std::string& attr : attributes) {
    if (attr.empty()) fail(Errc::parameter, "attribute string is empty");
  }
}

}  // namespace bpds::cloud
