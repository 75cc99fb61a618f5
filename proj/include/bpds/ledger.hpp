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
#include <variant>
#include <vector>

#include "bpds/emr.hpp"
#include "bpds/exec.hpp"

namespace bpds::ledger {

/// Patient's release of one EMR index: the index ciphertext, its digest,
/// and the patient's signature over the index bytes. Validators check the
/// signature against the declared digest; only the contract can decrypt.
struct ReleaseTx {
  Bytes index_ct;
  Digest index_hash{};
  Bigint signer_pk;
  emr::AcctSignature sig;
  Time t = 0;

  Bytes serialize() const;
  static ReleaseTx deserialize(ByteView data);
};

/// Third-party request for part i of an object.
struct AccessTx {
  AccountId requester;
  ObjectId obj;
  int i = 1;
  Time t = 0;

  Bytes serialize() const;
  static AccessTx deserialize(ByteView data);
};

using Tx = std::variant<ReleaseTx, AccessTx>;

Bytes tx_serialize(const Tx& tx);
Tx tx_deserialize(ByteView data);
Time tx_time(const Tx& tx);

/// True iff the declared digest matches the hash of `index_bytes`. Used
/// before submission; a mismatch means the release must not be queued.
bool release_tx_consistent(const ReleaseTx& tx, ByteView index_bytes);

/// One accounting node's audit verdict over a candidate block.
/// The signature covers res || reason || t.
struct Endorsement {
  Bigint pk_atn;
  uint8_t res = 0;  // 1 approve, 0 reject
  uint8_t reason = 0;
  Time t = 0;
  emr::AcctSignature sig;

  Bytes serialize() const;
  static Endorsement deserialize(ByteView data);
};

Bytes endorsement_message(uint8_t res, uint8_t reason, Time t);

/// Transaction plus its mempool admission time.
struct TimedTx {
  Tx tx;
  Time admitted = 0;
};

inline constexpr size_t kDigestBytes = 32;

/// Candidate/committed block. d_hash = H(d_set_bytes || t); the producer
/// signs d_set_bytes || d_hash; endorsements are collected audits.
struct Block {
  uint64_t height = 0;
  Digest prev_hash{};
  std::vector<TimedTx> d_set;
  Digest d_hash{};
  NodeId producer{0};
  emr::AcctSignature producer_sig;
  std::vector<Endorsement> endorsements;
  Time t = 0;

  Bytes d_set_bytes() const;
  Bytes serialize() const;
  static Block deserialize(ByteView data);
  Digest hash() const;  // H(serialize())
};

Digest compute_d_hash(ByteView d_set_bytes, Time t);
Bytes producer_message(ByteView d_set_bytes, const Digest& d_hash);

struct Chain {
  std::vector<Block> blocks;

  const Block* tip() const { return blocks.empty() ? nullptr : &blocks.back(); }
  size_t height_count() const { return blocks.size(); }

  Bytes serialize() const;
  static Chain deserialize(ByteView data);
};

enum class Admission : uint8_t {
  queued,
  signature_invalid,
  hash_mismatch,
  timestamp_stale,
  index_out_of_range,
};

const char* admission_name(Admission a);

/// Structural and signature checks that hold for queued and committed
/// transactions alike (no staleness; history is old by definition).
Admission validate_tx_static(const Tx& tx, const GroupParams& params);

/// Pending-transaction queue. submit() re-runs the static checks plus a
/// freshness window; force_enqueue() bypasses them (fault injection).
class Mempool {
 public:
  explicit Mempool(GroupParams params, Time max_age = 60000);

  Admission submit(const Tx& tx, Time now);
  /// Release submission with the plaintext index in hand: also checks the
  /// declared digest against the bytes (hash-mismatch).
  Admission submit_release(const ReleaseTx& tx, ByteView index_bytes, Time now);
  void force_enqueue(const Tx& tx, Time admitted);
  std::vector<TimedTx> drain();
  size_t size() const { return queue_.size(); }

 private:
  GroupParams params_;
  Time max_age_;
  std::vector<TimedTx> queue_;
};

/// Node id -> account public value, shared group parameters.
struct ValidatorRegistry {
  GroupParams params;
  std::map<NodeId, Bigint> node_pk;

  const Bigint* find(NodeId id) const;
  bool has_pk(const Bigint& pk) const;

  Bytes serialize() const;
  static ValidatorRegistry deserialize(ByteView data);
};

struct Validation {
  bool ok = true;
  std::string reason;
};

/// Candidate block plus the broadcast record the auditors receive. The
/// record is the serialized candidate (endorsements still empty).
struct BuildResult {
  Block block;
  Bytes rec;
};

/// Drains the mempool, drops entries that fail the static checks, and
/// assembles a signed candidate on top of prev. An empty queue still
/// yields an (empty) block so the slot cadence stays regular.
BuildResult build_block(const emr::AccountKeyPair& producer_keys, NodeId producer,
                        Mempool& mempool, const Block* prev, Time now);

/// ceil(0.51 * atn_count) without floating point.
int quorum_threshold(int atn_count);

/// Full structural + signature validation of one block against its
/// predecessor (null prev = first block: height 0, all-zero prev_hash).
/// expected_producer, when set, pins the slot schedule.
Validation validate_block(const Block& block, const Block* prev, const ValidatorRegistry& reg,
                          std::optional<NodeId> expected_producer);

/// Approvals with a valid signature from a registered key, deduplicated
/// by key. Rejections and unverifiable endorsements do not count.
int count_valid_approvals(const Block& block, const ValidatorRegistry& reg);

/// Validates, checks quorum, and appends. Throws Errc::validation or
/// Errc::quorum on failure.
void append_block(Chain& chain, Block block, const ValidatorRegistry& reg, int atn_count);

struct ChainVerifyResult {
  bool ok = true;
  int64_t first_invalid = -1;  // height of the first bad block
  std::string reason;
};

/// Reference implementation: full per-block validation, in order.
ChainVerifyResult chain_verify_serial(const Chain& chain, const ValidatorRegistry& reg,
                                      int atn_count);

/// Phased verifier: a cheap sequential structure pass, then a signature
/// pass over the surviving prefix (OpenMP kernel when it pays off).
/// Always returns the same verdict and first_invalid as the reference.
ChainVerifyResult chain_verify(const Chain& chain, const ValidatorRegistry& reg, int atn_count,
                               Exec exec = Exec::automatic);

/// One line per block: height, hash prefix, producer, tx and endorsement
/// counts, timestamp.
std::string dump_chain(const Chain& chain);

}  // namespace bpds::ledger
