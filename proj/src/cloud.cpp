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

#include "bpds/cloud.hpp"

#include <algorithm>
#include <sstream>

#include "bpds/codec.hpp"
#include "bpds/errors.hpp"
#include "bpds/hash.hpp"

namespace bpds::cloud {

const char* log_action_name(LogAction action) {
  switch (action) {
    case LogAction::store:
      return "store";
    case LogAction::retrieve_granted:
      return "retrieve-granted";
    case LogAction::retrieve_denied:
      return "retrieve-denied";
  }
  fail(Errc::parameter, "unknown log action");
}

CloudStore::CloudStore(Rng rng) : master_(SymKey::random(rng)), rng_(std::move(rng)) {}

void CloudStore::append_log(Time t, const AccountId& actor, const std::string& url,
                            LogAction action) {
  if (!log_.empty() && t < log_.back().t)
    fail(Errc::invariant, "access log time went backwards");
  log_.push_back(AccessLogEntry{t, actor, url, action});
}

std::string CloudStore::store(const AccountId& owner, int part_index, ByteView m,
                              const Bigint& h, const ces::CesTag& tag,
                              const AccessPolicy& policy,
                              const ces::ExtractedSignature& esig, const Clock& clock) {
  if (part_index < 1 || part_index > ces::kParts)
    fail(Errc::index, "part index out of range");
  policy.validate();

  SymKey k = SymKey::random(rng_);
  ByteWriter plain;
  plain.block(m);
  plain.block(bigint_to_bytes(h));
  plain.raw(ByteView(tag.bytes.data(), tag.bytes.size()));

  StoredTriple triple{{}, {}, esig, policy, owner, part_index};
  triple.data_ct = aead_seal(k, plain.bytes(), rng_);

  Bytes policy_bytes = policy.serialize();
  ByteWriter key_plain;
  key_plain.raw(ByteView(k.bytes.data(), k.bytes.size()));
  key_plain.block(policy_bytes);
  triple.wrapped_key = aead_seal(master_, key_plain.bytes(), rng_);

  std::string url = "cloud://" + owner.hex() + "/" + std::to_string(part_index) + "/" +
                    to_hex(rng_.bytes(8));
  triples_.emplace(url, std::move(triple));
  append_log(clock.now(), owner, url, LogAction::store);
  return url;
}

RetrievedPart CloudStore::retrieve(const std::string& url, const AttributeKey& key,
                                   const Clock& clock) {
  key.validate();
  auto it = triples_.find(url);
  if (it == triples_.end()) fail(Errc::not_found, "unknown url: " + url);
  const StoredTriple& triple = it->second;

  if (!policy_satisfies(key.attributes, triple.policy)) {
    append_log(clock.now(), key.holder, url, LogAction::retrieve_denied);
    fail(Errc::access_denied, "attributes do not satisfy the policy");
  }

  RetrievedPart out{{}, 0, {}, triple.esig};
  try {
    Bytes key_plain = aead_open(master_, triple.wrapped_key);
    ByteReader krd(key_plain);
    Bytes key_bytes = krd.raw(32);
    Bytes sealed_policy = krd.block();
    krd.expect_done();
    if (sealed_policy != triple.policy.serialize())
      fail(Errc::decrypt, "policy binding mismatch");
    SymKey k;
    std::copy(key_bytes.begin(), key_bytes.end(), k.bytes.begin());
    Bytes data_plain = aead_open(k, triple.data_ct);

    ByteReader rd(data_plain);
    out.m = rd.block();
    Bytes h_raw = rd.block();
    out.h = bigint_from_bytes(h_raw);
    Bytes tag_bytes = rd.raw(out.tag.bytes.size());
    std::copy(tag_bytes.begin(), tag_bytes.end(), out.tag.bytes.begin());
    rd.expect_done();
  } catch (const Error&) {
    append_log(clock.now(), key.holder, url, LogAction::retrieve_denied);
    fail(Errc::decrypt, "stored data failed authenticated decryption");
  }

  append_log(clock.now(), key.holder, url, LogAction::retrieve_granted);
  return out;
}

std::vector<AccessLogEntry> CloudStore::audit_log(const LogFilter& filter) const {
  std::vector<AccessLogEntry> out;
  for (const AccessLogEntry& entry : log_) {
    if (filter.actor && entry.actor != *filter.actor) continue;
    if (filter.url && entry.url != *filter.url) continue;
    if (filter.from && entry.t < *filter.from) continue;
    if (filter.until && entry.t > *filter.until) continue;
    out.push_back(entry);
  }
  return out;
}

const StoredTriple& CloudStore::triple(const std::string& url) const {
  auto it = triples_.find(url);
  if (it == triples_.end()) fail(Errc::not_found, "unknown url: " + url);
  return it->second;
}

void CloudStore::corrupt_data(const std::string& url, size_t byte_index, uint8_t mask) {
  auto it = triples_.find(url);
  if (it == triples_.end()) fail(Errc::not_found, "unknown url: " + url);
  if (byte_index >= it->second.data_ct.size())
    fail(Errc::index, "corruption offset out of range");
  it->second.data_ct[byte_index] ^= mask;
}

std::string CloudStore::dump_triples() const {
  std::ostringstream out;
  for (const auto& [url, triple] : triples_) {
    out << url << " owner=" << triple.owner.hex() << " part=" << triple.part_index
        << " policy=" << triple.policy.render() << " data_ct=" << to_hex(triple.data_ct)
        << " esig=" << triple.esig.hex() << "\n";
  }
  return out.str();
}

std::string CloudStore::dump_log() const {
  std::ostringstream out;
  for (const AccessLogEntry& entry : log_) {
    out << entry.t << " " << entry.actor.hex() << " " << entry.url << " "
        << log_action_name(entry.action) << "\n";
  }
  return out.str();
}

}  // namespace bpds::cloud
