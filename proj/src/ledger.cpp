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

#include "bpds/ledger.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bpds/bignum.hpp"
#include "bpds/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bpds::ledger {

namespace {

Digest read_digest(ByteReader& r) {
  Bytes raw = r.raw(kDigestBytes);
  Digest d;
  std::copy(raw.begin(), raw.end(), d.begin());
  return d;
}

ReleaseTx read_release(ByteReader& r) {
  ReleaseTx tx;
  tx.index_ct = r.block();
  tx.index_hash = read_digest(r);
  tx.signer_pk = read_bigint_block(r);
  tx.sig = emr::AcctSignature::deserialize(r.block());
  tx.t = r.i64();
  return tx;
}

void write_release(ByteWriter& w, const ReleaseTx& tx) {
  w.block(tx.index_ct);
  w.raw(ByteView(tx.index_hash.data(), tx.index_hash.size()));
  write_bigint_block(w, tx.signer_pk);
  w.block(tx.sig.serialize());
  w.i64(tx.t);
}

AccessTx read_access(ByteReader& r) {
  AccessTx tx;
  Bytes requester = r.raw(16);
  std::copy(requester.begin(), requester.end(), tx.requester.bytes.begin());
  Bytes obj = r.raw(16);
  std::copy(obj.begin(), obj.end(), tx.obj.bytes.begin());
  tx.i = r.u8();
  if (tx.i < 1 || tx.i > 7) fail(Errc::decode, "access index out of range");
  tx.t = r.i64();
  return tx;
}

void write_access(ByteWriter& w, const AccessTx& tx) {
  w.raw(ByteView(tx.requester.bytes.data(), tx.requester.bytes.size()));
  w.raw(ByteView(tx.obj.bytes.data(), tx.obj.bytes.size()));
  w.u8(static_cast<uint8_t>(tx.i));
  w.i64(tx.t);
}

Endorsement read_endorsement(ByteReader& r) {
  Endorsement e;
  e.pk_atn = read_bigint_block(r);
  e.res = r.u8();
  if (e.res > 1) fail(Errc::decode, "endorsement verdict must be 0 or 1");
  e.reason = r.u8();
  e.t = r.i64();
  e.sig = emr::AcctSignature::deserialize(r.block());
  return e;
}

void write_endorsement(ByteWriter& w, const Endorsement& e) {
  write_bigint_block(w, e.pk_atn);
  w.u8(e.res);
  w.u8(e.reason);
  w.i64(e.t);
  w.block(e.sig.serialize());
}

bool endorsement_checks_out(const Endorsement& e, const ValidatorRegistry& reg) {
  if (e.res > 1) return false;
  if (!reg.has_pk(e.pk_atn)) return false;
  Bytes msg = endorsement_message(e.res, e.reason, e.t);
  return emr::acct_verify(emr::AccountPublicKey{reg.params, e.pk_atn}, msg, e.sig);
}

constexpr const char* kReasonHeight = "height not sequential";
constexpr const char* kReasonPrev = "previous-hash linkage broken";
constexpr const char* kReasonTime = "timestamp not increasing";
constexpr const char* kReasonDHash = "d_hash does not match d_set";
constexpr const char* kReasonSchedule = "producer outside the slot schedule";
constexpr const char* kReasonUnknown = "producer not registered";
constexpr const char* kReasonProdSig = "producer signature invalid";
constexpr const char* kReasonTx = "transaction invalid";
constexpr const char* kReasonEndorse = "endorsement invalid";
constexpr const char* kReasonQuorum = "approvals below quorum";

/// Structure-only subset of the block checks: linkage, d_hash, clock, and
/// registry membership. No modular exponentiation.
Validation validate_block_structure(const Block& block, const Block* prev,
                                    const ValidatorRegistry& reg,
                                    std::optional<NodeId> expected_producer) {
  if (prev == nullptr) {
    if (block.height != 0) return {false, kReasonHeight};
    if (block.prev_hash != Digest{}) return {false, kReasonPrev};
    if (block.t < 0) return {false, kReasonTime};
  } else {
    if (block.height != prev->height + 1) return {false, kReasonHeight};
    if (block.prev_hash != prev->hash()) return {false, kReasonPrev};
    if (block.t <= prev->t) return {false, kReasonTime};
  }
  if (block.d_hash != compute_d_hash(block.d_set_bytes(), block.t)) {
    return {false, kReasonDHash};
  }
  if (expected_producer && !(block.producer == *expected_producer)) {
    return {false, kReasonSchedule};
  }
  if (reg.find(block.producer) == nullptr) return {false, kReasonUnknown};
  for (const TimedTx& item : block.d_set) {
    if (const auto* access = std::get_if<AccessTx>(&item.tx)) {
      if (access->i < 1 || access->i > 7) return {false, kReasonTx};
    } else {
      const auto& release = std::get<ReleaseTx>(item.tx);
      if (release.signer_pk < 2 || release.signer_pk >= reg.params.p) {
        return {false, kReasonTx};
      }
    }
  }
  for (const Endorsement& e : block.endorsements) {
    if (e.res > 1 || !reg.has_pk(e.pk_atn)) return {false, kReasonEndorse};
  }
  return {true, ""};
}

/// Raw approval ceiling: distinct registered approving keys, signatures
/// not yet checked. An upper bound on count_valid_approvals.
int count_raw_approvals(const Block& block, const ValidatorRegistry& reg) {
  std::set<Bigint> seen;
  int count = 0;
  for (const Endorsement& e : block.endorsements) {
    if (e.res != 1) continue;
    if (!reg.has_pk(e.pk_atn)) continue;
    if (seen.insert(e.pk_atn).second) ++count;
  }
  return count;
}

/// Signature-level subset: producer signature, transaction signatures,
/// endorsement signatures, and the verified approval count.
Validation validate_block_signatures(const Block& block, const ValidatorRegistry& reg,
                                     int atn_count) {
  const Bigint* producer_pk = reg.find(block.producer);
  if (producer_pk == nullptr) return {false, kReasonUnknown};
  Bytes d_set = block.d_set_bytes();
  Bytes msg = producer_message(d_set, block.d_hash);
  if (!emr::acct_verify(emr::AccountPublicKey{reg.params, *producer_pk}, msg,
                        block.producer_sig)) {
    return {false, kReasonProdSig};
  }
  for (const TimedTx& item : block.d_set) {
    if (validate_tx_static(item.tx, reg.params) != Admission::queued) {
      return {false, kReasonTx};
    }
  }
  for (const Endorsement& e : block.endorsements) {
    if (!endorsement_checks_out(e, reg)) return {false, kReasonEndorse};
  }
  if (count_valid_approvals(block, reg) < quorum_threshold(atn_count)) {
    return {false, kReasonQuorum};
  }
  return {true, ""};
}

}  // namespace

Bytes ReleaseTx::serialize() const {
  ByteWriter w;
  write_release(w, *this);
  return w.take();
}

ReleaseTx ReleaseTx::deserialize(ByteView data) {
  ByteReader r(data);
  ReleaseTx tx = read_release(r);
  r.expect_done();
  return tx;
}

Bytes AccessTx::serialize() const {
  ByteWriter w;
  write_access(w, *this);
  return w.take();
}

AccessTx AccessTx::deserialize(ByteView data) {
  ByteReader r(data);
  AccessTx tx = read_access(r);
  r.expect_done();
  return tx;
}

Bytes tx_serialize(const Tx& tx) {
  ByteWriter w;
  if (const auto* release = std::get_if<ReleaseTx>(&tx)) {
    w.u8(0);
    write_release(w, *release);
  } else {
    w.u8(1);
    write_access(w, std::get<AccessTx>(tx));
  }
  return w.take();
}

Tx tx_deserialize(ByteView data) {
  ByteReader r(data);
  uint8_t kind = r.u8();
  Tx tx = [&]() -> Tx {
    if (kind == 0) return read_release(r);
    if (kind == 1) return read_access(r);
    fail(Errc::decode, "unknown transaction kind");
  }();
  r.expect_done();
  return tx;
}

Time tx_time(const Tx& tx) {
  if (const auto* release = std::get_if<ReleaseTx>(&tx)) return release->t;
  return std::get<AccessTx>(tx).t;
}

bool release_tx_consistent(const ReleaseTx& tx, ByteView index_bytes) {
  return sha256(index_bytes) == tx.index_hash;
}

Bytes Endorsement::serialize() const {
  ByteWriter w;
  write_endorsement(w, *this);
  return w.take();
}

Endorsement Endorsement::deserialize(ByteView data) {
  ByteReader r(data);
  Endorsement e = read_endorsement(r);
  r.expect_done();
  return e;
}

Bytes endorsement_message(uint8_t res, uint8_t reason, Time t) {
  ByteWriter w;
  w.u8(res);
  w.u8(reason);
  w.i64(t);
  return w.take();
}

Bytes Block::d_set_bytes() const {
  ByteWriter w;
  w.u32(static_cast<uint32_t>(d_set.size()));
  for (const TimedTx& item : d_set) {
    w.block(tx_serialize(item.tx));
    w.i64(item.admitted);
  }
  return w.take();
}

Digest compute_d_hash(ByteView d_set_bytes, Time t) {
  ByteWriter w;
  w.raw(d_set_bytes);
  w.i64(t);
  return sha256(w.bytes());
}

Bytes producer_message(ByteView d_set_bytes, const Digest& d_hash) {
  ByteWriter w;
  w.raw(d_set_bytes);
  w.raw(ByteView(d_hash.data(), d_hash.size()));
  return w.take();
}

Bytes Block::serialize() const {
  ByteWriter w;
  w.u64(height);
  w.raw(ByteView(prev_hash.data(), prev_hash.size()));
  w.raw(d_set_bytes());
  w.raw(ByteView(d_hash.data(), d_hash.size()));
  w.u32(producer.value);
  w.block(producer_sig.serialize());
  w.u32(static_cast<uint32_t>(endorsements.size()));
  for (const Endorsement& e : endorsements) write_endorsement(w, e);
  w.i64(t);
  return w.take();
}

Block Block::deserialize(ByteView data) {
  ByteReader r(data);
  Block b;
  b.height = r.u64();
  b.prev_hash = read_digest(r);
  uint32_t tx_count = r.u32();
  b.d_set.reserve(std::min<uint32_t>(tx_count, 4096));
  for (uint32_t i = 0; i < tx_count; ++i) {
    Bytes tx_bytes = r.block();
    Time admitted = r.i64();
    b.d_set.push_back(TimedTx{tx_deserialize(tx_bytes), admitted});
  }
  b.d_hash = read_digest(r);
  b.producer = NodeId{r.u32()};
  b.producer_sig = emr::AcctSignature::deserialize(r.block());
  uint32_t endo_count = r.u32();
  b.endorsements.reserve(std::min<uint32_t>(endo_count, 4096));
  for (uint32_t i = 0; i < endo_count; ++i) b.endorsements.push_back(read_endorsement(r));
  b.t = r.i64();
  r.expect_done();
  return b;
}

Digest Block::hash() const { return sha256(serialize()); }

Bytes Chain::serialize() const {
  ByteWriter w;
  w.u32(static_cast<uint32_t>(blocks.size()));
  for (const Block& b : blocks) w.block(b.serialize());
  return w.take();
}

Chain Chain::deserialize(ByteView data) {
  ByteReader r(data);
  Chain chain;
  uint32_t count = r.u32();
  chain.blocks.reserve(std::min<uint32_t>(count, 4096));
  for (uint32_t i = 0; i < count; ++i) {
    chain.blocks.push_back(Block::deserialize(r.block()));
  }
  r.expect_done();
  return chain;
}

const char* admission_name(Admission a) {
  switch (a) {
    case Admission::queued:
      return "queued";
    case Admission::signature_invalid:
      return "signature-invalid";
    case Admission::hash_mismatch:
      return "hash-mismatch";
    case Admission::timestamp_stale:
      return "timestamp-stale";
    case Admission::index_out_of_range:
      return "index-out-of-range";
  }
  fail(Errc::parameter, "unknown admission result");
}

Admission validate_tx_static(const Tx& tx, const GroupParams& params) {
  if (const auto* release = std::get_if<ReleaseTx>(&tx)) {
    if (!emr::acct_verify_digest(params, release->signer_pk, release->index_hash,
                                 release->sig)) {
      return Admission::signature_invalid;
    }
    return Admission::queued;
  }
  const auto& access = std::get<AccessTx>(tx);
  if (access.i < 1 || access.i > 7) return Admission::index_out_of_range;
  return Admission::queued;
}

Mempool::Mempool(GroupParams params, Time max_age)
    : params_(std::move(params)), max_age_(max_age) {
  if (max_age_ <= 0) fail(Errc::parameter, "mempool freshness window must be positive");
}

Admission Mempool::submit(const Tx& tx, Time now) {
  Admission verdict = validate_tx_static(tx, params_);
  if (verdict != Admission::queued) return verdict;
  Time t = tx_time(tx);
  if (t > now || now - t > max_age_) return Admission::timestamp_stale;
  queue_.push_back(TimedTx{tx, now});
  return Admission::queued;
}

Admission Mempool::submit_release(const ReleaseTx& tx, ByteView index_bytes, Time now) {
  if (!release_tx_consistent(tx, index_bytes)) return Admission::hash_mismatch;
  return submit(Tx{tx}, now);
}

void Mempool::force_enqueue(const Tx& tx, Time admitted) {
  queue_.push_back(TimedTx{tx, admitted});
}

std::vector<TimedTx> Mempool::drain() {
  std::vector<TimedTx> out = std::move(queue_);
  queue_.clear();
  return out;
}

const Bigint* ValidatorRegistry::find(NodeId id) const {
  auto it = node_pk.find(id);
  return it == node_pk.end() ? nullptr : &it->second;
}

bool ValidatorRegistry::has_pk(const Bigint& pk) const {
  for (const auto& [id, value] : node_pk) {
    if (value == pk) return true;
  }
  return false;
}

Bytes ValidatorRegistry::serialize() const {
  ByteWriter w;
  write_bigint_block(w, params.p);
  write_bigint_block(w, params.g);
  w.u32(static_cast<uint32_t>(node_pk.size()));
  for (const auto& [id, pk] : node_pk) {
    w.u32(id.value);
    write_bigint_block(w, pk);
  }
  return w.take();
}

ValidatorRegistry ValidatorRegistry::deserialize(ByteView data) {
  ByteReader r(data);
  ValidatorRegistry reg;
  reg.params.p = read_bigint_block(r);
  reg.params.g = read_bigint_block(r);
  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    NodeId id{r.u32()};
    Bigint pk = read_bigint_block(r);
    if (!reg.node_pk.emplace(id, std::move(pk)).second) {
      fail(Errc::decode, "duplicate node id in registry");
    }
  }
  r.expect_done();
  return reg;
}

int quorum_threshold(int atn_count) {
  if (atn_count <= 0) fail(Errc::parameter, "accounting node count must be positive");
  return (51 * atn_count + 99) / 100;
}

BuildResult build_block(const emr::AccountKeyPair& producer_keys, NodeId producer,
                        Mempool& mempool, const Block* prev, Time now) {
  Block block;
  block.height = prev == nullptr ? 0 : prev->height + 1;
  block.prev_hash = prev == nullptr ? Digest{} : prev->hash();
  for (TimedTx& item : mempool.drain()) {
    if (validate_tx_static(item.tx, producer_keys.params) == Admission::queued) {
      block.d_set.push_back(std::move(item));
    }
  }
  block.t = now;
  block.producer = producer;
  Bytes d_set = block.d_set_bytes();
  block.d_hash = compute_d_hash(d_set, block.t);
  block.producer_sig = emr::acct_sign(producer_keys, producer_message(d_set, block.d_hash));
  Bytes rec = block.serialize();
  return BuildResult{std::move(block), std::move(rec)};
}

Validation validate_block(const Block& block, const Block* prev, const ValidatorRegistry& reg,
                          std::optional<NodeId> expected_producer) {
  Validation v = validate_block_structure(block, prev, reg, expected_producer);
  if (!v.ok) return v;
  Bytes d_set = block.d_set_bytes();
  Bytes msg = producer_message(d_set, block.d_hash);
  const Bigint* producer_pk = reg.find(block.producer);
  if (!emr::acct_verify(emr::AccountPublicKey{reg.params, *producer_pk}, msg,
                        block.producer_sig)) {
    return {false, kReasonProdSig};
  }
  for (const TimedTx& item : block.d_set) {
    if (validate_tx_static(item.tx, reg.params) != Admission::queued) {
      return {false, kReasonTx};
    }
  }
  for (const Endorsement& e : block.endorsements) {
    if (!endorsement_checks_out(e, reg)) return {false, kReasonEndorse};
  }
  return {true, ""};
}

int count_valid_approvals(const Block& block, const ValidatorRegistry& reg) {
  std::set<Bigint> seen;
  int count = 0;
  for (const Endorsement& e : block.endorsements) {
    if (e.res != 1) continue;
    if (!endorsement_checks_out(e, reg)) continue;
    if (seen.insert(e.pk_atn).second) ++count;
  }
  return count;
}

void append_block(Chain& chain, Block block, const ValidatorRegistry& reg, int atn_count) {
  Validation v = validate_block(block, chain.tip(), reg, std::nullopt);
  if (!v.ok) fail(Errc::validation, v.reason);
  if (count_valid_approvals(block, reg) < quorum_threshold(atn_count)) {
    fail(Errc::quorum, kReasonQuorum);
  }
  chain.blocks.push_back(std::move(block));
}

ChainVerifyResult chain_verify_serial(const Chain& chain, const ValidatorRegistry& reg,
                                      int atn_count) {
  int threshold = quorum_threshold(atn_count);
  const Block* prev = nullptr;
  for (size_t i = 0; i < chain.blocks.size(); ++i) {
    const Block& b = chain.blocks[i];
    Validation v = validate_block(b, prev, reg, std::nullopt);
    if (!v.ok) return {false, static_cast<int64_t>(i), v.reason};
    if (count_valid_approvals(b, reg) < threshold) {
      return {false, static_cast<int64_t>(i), kReasonQuorum};
    }
    prev = &b;
  }
  return {true, -1, ""};
}

ChainVerifyResult chain_verify(const Chain& chain, const ValidatorRegistry& reg, int atn_count,
                               Exec exec) {
  const size_t n = chain.blocks.size();
  int threshold = quorum_threshold(atn_count);

  size_t structural_ok = n;
  std::string structural_reason;
  const Block* prev = nullptr;
  for (size_t i = 0; i < n; ++i) {
    const Block& b = chain.blocks[i];
    Validation v = validate_block_structure(b, prev, reg, std::nullopt);
    if (v.ok && count_raw_approvals(b, reg) < threshold) v = {false, kReasonQuorum};
    if (!v.ok) {
      structural_ok = i;
      structural_reason = v.reason;
      break;
    }
    prev = &b;
  }

  std::vector<uint8_t> sig_ok(structural_ok, 1);
  std::vector<std::string> sig_reason(structural_ok);
  size_t sig_work = 0;
  for (size_t i = 0; i < structural_ok; ++i) {
    sig_work += 1 + chain.blocks[i].d_set.size() + chain.blocks[i].endorsements.size();
  }
  bool parallel = use_parallel(exec, sig_work, 2048);

  auto check_one = [&](size_t i) {
    Validation v = validate_block_signatures(chain.blocks[i], reg, atn_count);
    if (!v.ok) {
      sig_ok[i] = 0;
      sig_reason[i] = v.reason;
    }
  };

  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < structural_ok; ++i) check_one(i);
#else
    for (size_t i = 0; i < structural_ok; ++i) check_one(i);
#endif
  } else {
    for (size_t i = 0; i < structural_ok; ++i) check_one(i);
  }

  for (size_t i = 0; i < structural_ok; ++i) {
    if (!sig_ok[i]) return {false, static_cast<int64_t>(i), sig_reason[i]};
  }
  if (structural_ok < n) {
    return {false, static_cast<int64_t>(structural_ok), structural_reason};
  }
  return {true, -1, ""};
}

std::string dump_chain(const Chain& chain) {
  std::ostringstream out;
  for (const Block& b : chain.blocks) {
    out << "height=" << b.height
        << " prev=" << to_hex(ByteView(b.prev_hash.data(), b.prev_hash.size()))
        << " d_hash=" << to_hex(ByteView(b.d_hash.data(), b.d_hash.size()))
        << " producer=" << b.producer.value << " endorsements=" << b.endorsements.size()
        << " txs=" << b.d_set.size() << " t=" << b.t << "\n";
  }
  return out.str();
}

}  // namespace bpds::ledger
