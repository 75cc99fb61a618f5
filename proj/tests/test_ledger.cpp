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

#include <doctest.h>

#include "bpds/bignum.hpp"
#include "bpds/errors.hpp"

using namespace bpds;
using namespace bpds::ledger;

namespace {

struct Net {
  GroupParams params = test_profile();
  Rng rng{5150};
  std::vector<emr::AccountKeyPair> keys;
  ValidatorRegistry reg;
  emr::AccountKeyPair patient{test_profile(), 1, 1, emr::Role::patient};

  explicit Net(int nodes = 24) {
    reg.params = params;
    for (int i = 0; i < nodes; ++i) {
      keys.push_back(emr::acct_keygen(params, emr::Role::node, rng));
      reg.node_pk[NodeId{static_cast<uint32_t>(i)}] = keys.back().y;
    }
    patient = emr::acct_keygen(params, emr::Role::patient, rng);
  }

  ReleaseTx release(Time t, const std::string& text) {
    Bytes index_bytes = to_bytes(text);
    ReleaseTx tx;
    tx.index_ct = emr::asym_encrypt(patient.public_key(), index_bytes, rng);
    tx.index_hash = sha256(index_bytes);
    tx.signer_pk = patient.y;
    tx.sig = emr::acct_sign_digest(patient, tx.index_hash);
    tx.t = t;
    return tx;
  }

  AccessTx access(Time t, int i) {
    AccessTx tx;
    tx.requester = emr::account_id_for(patient.y);
    tx.obj = ObjectId::from_hex_str("00112233445566778899aabbccddeeff");
    tx.i = i;
    tx.t = t;
    return tx;
  }

  Endorsement endorse(size_t key_index, uint8_t res, Time t) {
    Endorsement e;
    e.pk_atn = keys[key_index].y;
    e.res = res;
    e.reason = res == 1 ? 0 : 1;
    e.t = t;
    e.sig = emr::acct_sign(keys[key_index], endorsement_message(e.res, e.reason, e.t));
    return e;
  }

  /// Valid block on top of prev, produced by node `producer`, endorsed by
  /// keys [4, 4 + approvals).
  Block block(const Block* prev, uint32_t producer, Time t, std::vector<Tx> txs,
              int approvals = 11) {
    Mempool pool(params);
    for (const Tx& tx : txs) pool.force_enqueue(tx, t - 1);
    BuildResult built = build_block(keys[producer], NodeId{producer}, pool, prev, t);
    for (int j = 0; j < approvals; ++j) {
      built.block.endorsements.push_back(endorse(static_cast<size_t>(4 + j), 1, t + 1));
    }
    return std::move(built.block);
  }

  Chain chain(int blocks, int txs_per_block = 1) {
    Chain c;
    for (int h = 0; h < blocks; ++h) {
      std::vector<Tx> txs;
      for (int j = 0; j < txs_per_block; ++j) {
        Time t = 1000 * (h + 1);
        if ((h + j) % 2 == 0) {
          txs.push_back(release(t - 2, "index-" + std::to_string(h) + "-" + std::to_string(j)));
        } else {
          txs.push_back(access(t - 2, 1 + (h + j) % 7));
        }
      }
      Block b = block(c.tip(), static_cast<uint32_t>(h % 4), 1000 * (h + 1), std::move(txs));
      append_block(c, std::move(b), reg, 20);
    }
    return c;
  }
};

}  // namespace

TEST_CASE("transaction serialization round trips") {
  Net net;
  ReleaseTx rel = net.release(500, "an index");
  Bytes rel_wire = rel.serialize();
  ReleaseTx rel2 = ReleaseTx::deserialize(rel_wire);
  CHECK(rel2.serialize() == rel_wire);
  CHECK(rel2.index_hash == rel.index_hash);
  CHECK(rel2.signer_pk == rel.signer_pk);
  CHECK(rel2.t == rel.t);

  AccessTx acc = net.access(600, 5);
  Bytes acc_wire = acc.serialize();
  AccessTx acc2 = AccessTx::deserialize(acc_wire);
  CHECK(acc2.serialize() == acc_wire);
  CHECK(acc2.i == 5);

  Tx as_variant = Tx{rel};
  Bytes tx_wire = tx_serialize(as_variant);
  CHECK(tx_wire[0] == 0);
  CHECK(tx_serialize(tx_deserialize(tx_wire)) == tx_wire);
  Tx acc_variant = Tx{acc};
  Bytes acc_tx_wire = tx_serialize(acc_variant);
  CHECK(acc_tx_wire[0] == 1);
  CHECK(tx_serialize(tx_deserialize(acc_tx_wire)) == acc_tx_wire);
}

TEST_CASE("decoders reject malformed transactions") {
  Net net;
  AccessTx acc = net.access(600, 5);
  Bytes wire = acc.serialize();
  Bytes bad_index = wire;
  bad_index[32] = 0;  // index byte after two 16-byte ids
  CHECK_THROWS_AS(AccessTx::deserialize(bad_index), Error);
  bad_index[32] = 8;
  CHECK_THROWS_AS(AccessTx::deserialize(bad_index), Error);

  Bytes padded = wire;
  padded.push_back(0);
  CHECK_THROWS_AS(AccessTx::deserialize(padded), Error);

  Bytes tx_wire = tx_serialize(Tx{acc});
  Bytes bad_kind = tx_wire;
  bad_kind[0] = 7;
  CHECK_THROWS_AS(tx_deserialize(bad_kind), Error);

  ReleaseTx rel = net.release(500, "x");
  Bytes rel_wire = rel.serialize();
  Bytes trunc(rel_wire.begin(), rel_wire.end() - 1);
  CHECK_THROWS_AS(ReleaseTx::deserialize(trunc), Error);
}

TEST_CASE("release consistency binds the digest to the plaintext index") {
  Net net;
  Bytes index_bytes = to_bytes("the real index");
  ReleaseTx tx = net.release(100, "the real index");
  CHECK(release_tx_consistent(tx, index_bytes));
  CHECK_FALSE(release_tx_consistent(tx, to_bytes("another index")));
}

TEST_CASE("static transaction checks catch forged releases and bad indices") {
  Net net;
  ReleaseTx good = net.release(100, "honest");
  CHECK(validate_tx_static(Tx{good}, net.params) == Admission::queued);

  ReleaseTx forged = good;
  forged.index_hash = sha256(to_bytes("substituted"));
  CHECK(validate_tx_static(Tx{forged}, net.params) == Admission::signature_invalid);

  ReleaseTx wrong_key = good;
  wrong_key.signer_pk = net.keys[0].y;
  CHECK(validate_tx_static(Tx{wrong_key}, net.params) == Admission::signature_invalid);

  AccessTx bad = net.access(100, 5);
  bad.i = 9;
  CHECK(validate_tx_static(Tx{bad}, net.params) == Admission::index_out_of_range);
}

TEST_CASE("mempool admission enforces signatures and freshness") {
  Net net;
  Mempool pool(net.params, 60000);

  CHECK(pool.submit(Tx{net.release(1000, "a")}, 1500) == Admission::queued);
  CHECK(pool.size() == 1);

  CHECK(pool.submit(Tx{net.release(1000, "b")}, 70000) == Admission::timestamp_stale);
  CHECK(pool.submit(Tx{net.release(2000, "c")}, 1500) == Admission::timestamp_stale);
  CHECK(pool.size() == 1);

  ReleaseTx forged = net.release(1000, "d");
  forged.index_hash = sha256(to_bytes("swap"));
  CHECK(pool.submit(Tx{forged}, 1500) == Admission::signature_invalid);

  ReleaseTx honest = net.release(1000, "e");
  CHECK(pool.submit_release(honest, to_bytes("e-but-different"), 1500) ==
        Admission::hash_mismatch);
  CHECK(pool.submit_release(honest, to_bytes("e"), 1500) == Admission::queued);

  pool.force_enqueue(Tx{forged}, 1600);
  CHECK(pool.size() == 3);
  auto drained = pool.drain();
  CHECK(drained.size() == 3);
  CHECK(pool.size() == 0);
}

TEST_CASE("build_block keeps only statically valid transactions") {
  Net net;
  Mempool pool(net.params);
  CHECK(pool.submit(Tx{net.release(900, "one")}, 1000) == Admission::queued);
  CHECK(pool.submit(Tx{net.release(910, "two")}, 1000) == Admission::queued);
  CHECK(pool.submit(Tx{net.access(920, 3)}, 1000) == Admission::queued);
  ReleaseTx forged = net.release(930, "three");
  forged.index_hash = sha256(to_bytes("not three"));
  pool.force_enqueue(Tx{forged}, 1000);

  BuildResult built = build_block(net.keys[2], NodeId{2}, pool, nullptr, 2000);
  CHECK(built.block.d_set.size() == 3);
  CHECK(built.block.height == 0);
  CHECK(built.block.prev_hash == Digest{});
  CHECK(built.block.t == 2000);
  CHECK(built.block.d_hash == compute_d_hash(built.block.d_set_bytes(), 2000));
  CHECK(pool.size() == 0);

  Bytes msg = producer_message(built.block.d_set_bytes(), built.block.d_hash);
  CHECK(emr::acct_verify(net.keys[2].public_key(), msg, built.block.producer_sig));
  CHECK(built.rec == built.block.serialize());

  Mempool empty_pool(net.params);
  BuildResult empty = build_block(net.keys[3], NodeId{3}, empty_pool, &built.block, 3000);
  CHECK(empty.block.d_set.empty());
  CHECK(empty.block.height == 1);
  CHECK(empty.block.prev_hash == built.block.hash());
}

TEST_CASE("quorum threshold is an exact rational ceiling") {
  for (int n = 1; n <= 300; ++n) {
    int k = 0;
    while (100 * k < 51 * n) ++k;
    CHECK(quorum_threshold(n) == k);
  }
  CHECK(quorum_threshold(20) == 11);
  CHECK(quorum_threshold(100) == 51);
  CHECK_THROWS_AS(quorum_threshold(0), Error);
}

TEST_CASE("block validation accepts honest blocks and names each defect") {
  Net net;
  Block b0 = net.block(nullptr, 0, 1000, {Tx{net.release(990, "r0")}});
  Validation v = validate_block(b0, nullptr, net.reg, NodeId{0});
  CHECK(v.ok);

  Block b1 = net.block(&b0, 1, 2000, {Tx{net.access(1990, 4)}});
  CHECK(validate_block(b1, &b0, net.reg, NodeId{1}).ok);

  SUBCASE("height break") {
    Block bad = b1;
    bad.height = 5;
    CHECK_FALSE(validate_block(bad, &b0, net.reg, std::nullopt).ok);
  }
  SUBCASE("linkage break") {
    Block bad = b1;
    bad.prev_hash[3] ^= 1;
    Validation r = validate_block(bad, &b0, net.reg, std::nullopt);
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("linkage") != std::string::npos);
  }
  SUBCASE("timestamp not increasing") {
    Block bad = net.block(&b0, 1, 1000, {});
    CHECK_FALSE(validate_block(bad, &b0, net.reg, std::nullopt).ok);
  }
  SUBCASE("d_hash mismatch after tx tamper") {
    Block bad = b1;
    std::get<AccessTx>(bad.d_set[0].tx).i = 2;
    Validation r = validate_block(bad, &b0, net.reg, std::nullopt);
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("d_hash") != std::string::npos);
  }
  SUBCASE("schedule mismatch") {
    CHECK_FALSE(validate_block(b1, &b0, net.reg, NodeId{2}).ok);
  }
  SUBCASE("unknown producer") {
    Block bad = b1;
    bad.producer = NodeId{999};
    bad.d_hash = compute_d_hash(bad.d_set_bytes(), bad.t);
    CHECK_FALSE(validate_block(bad, &b0, net.reg, std::nullopt).ok);
  }
  SUBCASE("producer signature broken") {
    Block bad = b1;
    bad.producer_sig.s = mod(bad.producer_sig.s + 1, net.params.p - 1);
    Validation r = validate_block(bad, &b0, net.reg, std::nullopt);
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("producer signature") != std::string::npos);
  }
  SUBCASE("producer signature over different content") {
    Block bad = net.block(&b0, 1, 2000, {Tx{net.access(1990, 4)}});
    bad.producer_sig = b0.producer_sig;
    CHECK_FALSE(validate_block(bad, &b0, net.reg, std::nullopt).ok);
  }
  SUBCASE("genesis must start at height zero with a zero prev hash") {
    CHECK_FALSE(validate_block(b1, nullptr, net.reg, std::nullopt).ok);
  }
  SUBCASE("reordering transactions breaks the d_hash") {
    Block two = net.block(&b0, 1, 2000,
                          {Tx{net.release(1990, "ra")}, Tx{net.release(1991, "rb")}});
    CHECK(validate_block(two, &b0, net.reg, std::nullopt).ok);
    std::swap(two.d_set[0], two.d_set[1]);
    CHECK_FALSE(validate_block(two, &b0, net.reg, std::nullopt).ok);
  }
}

TEST_CASE("endorsement counting is deduplicated and signature-checked") {
  Net net;
  Block b = net.block(nullptr, 0, 1000, {}, 0);

  b.endorsements.push_back(net.endorse(4, 1, 1001));
  b.endorsements.push_back(net.endorse(4, 1, 1001));  // duplicate auditor
  b.endorsements.push_back(net.endorse(5, 0, 1001));  // rejection
  Endorsement forged = net.endorse(6, 1, 1001);
  forged.res = 0;  // signature no longer matches res
  b.endorsements.push_back(forged);
  CHECK(count_valid_approvals(b, net.reg) == 1);

  Endorsement stranger;
  stranger.pk_atn = Bigint(12345);
  stranger.res = 1;
  stranger.t = 1001;
  stranger.sig = b.endorsements[0].sig;
  b.endorsements.push_back(stranger);
  CHECK(count_valid_approvals(b, net.reg) == 1);

  for (int j = 0; j < 10; ++j) {
    b.endorsements.push_back(net.endorse(static_cast<size_t>(7 + j), 1, 1001));
  }
  CHECK(count_valid_approvals(b, net.reg) == 11);
}

TEST_CASE("append_block enforces validity, quorum, and no duplicates") {
  Net net;
  Chain c;
  Block b0 = net.block(nullptr, 0, 1000, {Tx{net.release(990, "r")}}, 11);
  append_block(c, b0, net.reg, 20);
  CHECK(c.blocks.size() == 1);

  Block ten = net.block(c.tip(), 1, 2000, {}, 10);
  CHECK_THROWS_AS(append_block(c, ten, net.reg, 20), Error);
  try {
    append_block(c, ten, net.reg, 20);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::quorum);
  }

  Block eleven = net.block(c.tip(), 1, 2000, {}, 11);
  append_block(c, eleven, net.reg, 20);
  CHECK(c.blocks.size() == 2);

  CHECK_THROWS_AS(append_block(c, eleven, net.reg, 20), Error);

  Block bad_endorse = net.block(c.tip(), 2, 3000, {}, 11);
  bad_endorse.endorsements[0].reason ^= 1;
  CHECK_THROWS_AS(append_block(c, bad_endorse, net.reg, 20), Error);
}

TEST_CASE("serial and phased chain verification agree on honest chains") {
  Net net;
  for (int len : {0, 1, 3}) {
    Chain c = net.chain(len, 2);
    ChainVerifyResult serial = chain_verify_serial(c, net.reg, 20);
    ChainVerifyResult fast = chain_verify(c, net.reg, 20, Exec::serial);
    ChainVerifyResult par = chain_verify(c, net.reg, 20, Exec::parallel);
    CHECK(serial.ok);
    CHECK(fast.ok == serial.ok);
    CHECK(par.ok == serial.ok);
    CHECK(fast.first_invalid == serial.first_invalid);
    CHECK(par.first_invalid == serial.first_invalid);
  }
}

TEST_CASE("verification pinpoints the first invalid block") {
  Net net;
  Chain c = net.chain(4, 1);

  SUBCASE("structure break in the middle") {
    c.blocks[2].t = c.blocks[1].t;  // timestamp rule
    auto serial = chain_verify_serial(c, net.reg, 20);
    auto fast = chain_verify(c, net.reg, 20);
    CHECK_FALSE(serial.ok);
    CHECK(serial.first_invalid == 2);
    CHECK(fast.ok == serial.ok);
    CHECK(fast.first_invalid == serial.first_invalid);
  }
  SUBCASE("signature break earlier than a structure break") {
    c.blocks[1].producer_sig.e = mod(c.blocks[1].producer_sig.e + 1, net.params.p - 1);
    c.blocks[3].prev_hash[0] ^= 0x80;
    auto serial = chain_verify_serial(c, net.reg, 20);
    auto fast = chain_verify(c, net.reg, 20);
    CHECK_FALSE(serial.ok);
    CHECK(serial.first_invalid == 1);
    CHECK(fast.first_invalid == 1);
    CHECK(fast.ok == serial.ok);
  }
  SUBCASE("endorsement forgery") {
    c.blocks[2].endorsements[3].t += 1;
    auto serial = chain_verify_serial(c, net.reg, 20);
    auto fast = chain_verify(c, net.reg, 20);
    CHECK_FALSE(serial.ok);
    CHECK(serial.first_invalid == 2);
    CHECK(fast.first_invalid == 2);
  }
  SUBCASE("dropping an endorsement below quorum") {
    c.blocks[0].endorsements.resize(10);
    auto serial = chain_verify_serial(c, net.reg, 20);
    auto fast = chain_verify(c, net.reg, 20);
    CHECK_FALSE(serial.ok);
    CHECK(serial.first_invalid == 0);
    CHECK(fast.first_invalid == 0);
    CHECK(fast.reason == serial.reason);
  }
}

TEST_CASE("every single-bit mutation of a small serialized chain is detected") {
  Net net;
  Chain c = net.chain(2, 1);
  Bytes wire = c.serialize();
  REQUIRE(chain_verify(Chain::deserialize(wire), net.reg, 20).ok);

  size_t missed = 0;
  for (size_t byte = 0; byte < wire.size(); ++byte) {
    for (int bit = 0; bit < 8; ++bit) {
      Bytes mutated = wire;
      mutated[byte] ^= static_cast<uint8_t>(1u << bit);
      try {
        Chain broken = Chain::deserialize(mutated);
        if (chain_verify(broken, net.reg, 20).ok) ++missed;
      } catch (const Error&) {
      }
    }
  }
  CHECK(missed == 0);
}

TEST_CASE("chain and registry serialization round trip") {
  Net net;
  Chain c = net.chain(3, 2);
  Bytes wire = c.serialize();
  Chain back = Chain::deserialize(wire);
  CHECK(back.serialize() == wire);
  CHECK(back.blocks.size() == 3);
  CHECK(chain_verify(back, net.reg, 20).ok);

  Bytes reg_wire = net.reg.serialize();
  ValidatorRegistry reg2 = ValidatorRegistry::deserialize(reg_wire);
  CHECK(reg2.serialize() == reg_wire);
  CHECK(reg2.node_pk.size() == net.reg.node_pk.size());
  CHECK(chain_verify(back, reg2, 20).ok);

  Bytes padded = wire;
  padded.push_back(0);
  CHECK_THROWS_AS(Chain::deserialize(padded), Error);
}

TEST_CASE("chain dump lists one block per line with linkage fields") {
  Net net;
  Chain c = net.chain(2, 1);
  std::string dump = dump_chain(c);
  CHECK(dump.find("height=0") != std::string::npos);
  CHECK(dump.find("height=1") != std::string::npos);
  CHECK(dump.find("prev=" + to_hex(ByteView(c.blocks[1].prev_hash.data(), 32))) !=
        std::string::npos);
  CHECK(std::count(dump.begin(), dump.end(), '\n') == 2);
}
