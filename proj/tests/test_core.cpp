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

#include "doctest.h"

#include "bpds/clock.hpp"
#include "bpds/codec.hpp"
#include "bpds/errors.hpp"
#include "bpds/hash.hpp"
#include "bpds/rng.hpp"
#include "bpds/types.hpp"

using namespace bpds;

TEST_CASE("hex round trip") {
  Bytes data = {0x00, 0x01, 0xab, 0xff};
  CHECK(to_hex(data) == "0001abff");
  CHECK(from_hex("0001abff") == data);
  CHECK(from_hex("") == Bytes{});
  CHECK_THROWS_AS(from_hex("abc"), Error);
  CHECK_THROWS_AS(from_hex("zz"), Error);
}

TEST_CASE("Id16 hex round trip") {
  AccountId id;
  for (size_t i = 0; i < id.bytes.size(); ++i) id.bytes[i] = static_cast<uint8_t>(i);
  CHECK(id.hex() == "000102030405060708090a0b0c0d0e0f");
  CHECK(AccountId::from_hex_str(id.hex()) == id);
  CHECK_THROWS_AS(AccountId::from_hex_str("00"), Error);
}

TEST_CASE("sha256 known vectors") {
  CHECK(digest_hex(sha256(Bytes{})) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  Bytes abc = {'a', 'b', 'c'};
  CHECK(digest_hex(sha256(abc)) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("codec round trip") {
  ByteWriter w;
  w.u8(0x7f);
  w.u32(0xdeadbeef);
  w.u64(0x0123456789abcdefULL);
  w.i64(-5);
  w.block(Bytes{1, 2, 3});
  w.str("hello");

  ByteReader r(w.bytes());
  CHECK(r.u8() == 0x7f);
  CHECK(r.u32() == 0xdeadbeef);
  CHECK(r.u64() == 0x0123456789abcdefULL);
  CHECK(r.i64() == -5);
  CHECK(r.block() == Bytes{1, 2, 3});
  CHECK(r.str() == "hello");
  CHECK(r.done());
  r.expect_done();
}

TEST_CASE("codec big-endian layout") {
  ByteWriter w;
  w.u32(0x01020304);
  CHECK(w.bytes() == Bytes{1, 2, 3, 4});
}

TEST_CASE("codec truncation and trailing errors") {
  ByteWriter w;
  w.u32(10);
  ByteReader r(w.bytes());
  CHECK_THROWS_AS(r.u64(), Error);

  ByteWriter w2;
  w2.u8(1);
  w2.u8(2);
  ByteReader r2(w2.bytes());
  r2.u8();
  CHECK_THROWS_AS(r2.expect_done(), Error);

  ByteWriter w3;
  w3.u32(100);
  ByteReader r3(w3.bytes());
  CHECK_THROWS_AS(r3.block(), Error);
}

TEST_CASE("rng determinism") {
  Rng a(42), b(42);
  for (int i = 0; i < 64; ++i) CHECK(a.next() == b.next());
  Rng c(43);
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 8; ++i) differs |= (a2.next() != c.next());
  CHECK(differs);
}

TEST_CASE("rng bounded draws") {
  Rng rng(7);
  CHECK(rng.next_below(1) == 0);
  for (int i = 0; i < 2000; ++i) CHECK(rng.next_below(7) < 7);
  for (int i = 0; i < 2000; ++i) {
    uint64_t v = rng.next_range(3, 9);
    CHECK(v >= 3);
    CHECK(v <= 9);
  }
  CHECK(rng.next_range(5, 5) == 5);

  bool saw_zero = false, saw_six = false;
  Rng rng2(11);
  for (int i = 0; i < 4000; ++i) {
    uint64_t v = rng2.next_below(7);
    saw_zero |= (v == 0);
    saw_six |= (v == 6);
  }
  CHECK(saw_zero);
  CHECK(saw_six);
}

TEST_CASE("rng chance extremes") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(rng.chance(0.0));
  for (int i = 0; i < 100; ++i) CHECK(rng.chance(1.0));
}

TEST_CASE("rng fill deterministic") {
  Rng a(9), b(9);
  CHECK(a.bytes(33) == b.bytes(33));
}

TEST_CASE("rng fork diverges from parent continuation") {
  Rng parent(5);
  Rng child = parent.fork();
  bool differs = false;
  for (int i = 0; i < 8; ++i) differs |= (child.next() != parent.next());
  CHECK(differs);
}

TEST_CASE("manual clock") {
  ManualClock clock;
  CHECK(clock.now() == 0);
  clock.set(100);
  CHECK(clock.now() == 100);
  clock.advance(50);
  CHECK(clock.now() == 150);
}

TEST_CASE("error carries code and name") {
  try {
    fail(Errc::decode, "broken");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::decode);
    CHECK(std::string(e.what()).find("decode") != std::string::npos);
    CHECK(std::string(e.what()).find("broken") != std::string::npos);
  }
}
