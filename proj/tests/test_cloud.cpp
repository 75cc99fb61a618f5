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

#include <doctest.h>

#include "bpds/bignum.hpp"
#include "bpds/emr.hpp"
#include "bpds/errors.hpp"

using namespace bpds;
using namespace bpds::cloud;

namespace {

struct Fixture {
  GroupParams params = test_profile();
  Rng rng{909};
  CloudStore store{Rng(910)};
  ManualClock clock{1000};
  AccountId owner = emr::account_id_for(Bigint(12345));
  ces::CesKeyPair kp = ces::keygen(params, rng);
  ces::Ceas ceas{{2, 3, 5}};
  ces::CesTag tag = ces::CesTag::random(rng);
  ces::PartBytes parts;
  ces::PartMap kept;
  ces::ExtractedSignature esig{ceas, {}, tag, Bigint(0), {}};

  Fixture() {
    for (int i = 0; i < ces::kParts; ++i) {
      parts[i] = to_bytes("part-" + std::to_string(i + 1));
    }
    ces::FullSignature full = ces::sign(kp, parts, ceas, tag, rng);
    auto [m_prime, extracted] = ces::extract(kp.public_key(), parts, full, {2, 3, 5});
    kept = std::move(m_prime);
    esig = std::move(extracted);
  }

  Bigint digest_of(int i) const { return bigint_from_digest(sha256(parts[i - 1])); }
};

AccessPolicy simple_policy() {
  return AccessPolicy::all_of(
      {AccessPolicy::leaf("medical"),
       AccessPolicy::any_of({AccessPolicy::leaf("research"), AccessPolicy::leaf("clinic")})});
}

}  // namespace

TEST_CASE("store then retrieve round trips part, digest, tag, and signature") {
  Fixture fx;
  std::string url =
      fx.store.store(fx.owner, 2, fx.kept.at(2), fx.digest_of(2), fx.tag, simple_policy(),
                     fx.esig, fx.clock);

  CHECK(fx.store.exists(url));
  CHECK(url.rfind("cloud://", 0) == 0);

  AttributeKey key{fx.owner, {"medical", "clinic"}};
  fx.clock.advance(500);
  RetrievedPart got = fx.store.retrieve(url, key, fx.clock);

  CHECK(got.m == fx.kept.at(2));
  CHECK(got.h == fx.digest_of(2));
  CHECK(got.tag == fx.tag);
  CHECK(got.esig.serialize() == fx.esig.serialize());
}

TEST_CASE("unsatisfied policy is denied and logged") {
  Fixture fx;
  std::string url = fx.store.store(fx.owner, 3, fx.kept.at(3), fx.digest_of(3), fx.tag,
                                   simple_policy(), fx.esig, fx.clock);

  AttributeKey weak{fx.owner, {"research"}};
  fx.clock.advance(10);
  CHECK_THROWS_AS(fx.store.retrieve(url, weak, fx.clock), Error);
  try {
    fx.store.retrieve(url, weak, fx.clock);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::access_denied);
  }

  auto log = fx.store.audit_log();
  REQUIRE(log.size() == 3);
  CHECK(log[0].action == LogAction::store);
  CHECK(log[1].action == LogAction::retrieve_denied);
  CHECK(log[2].action == LogAction::retrieve_denied);
  CHECK(log[1].url == url);
}

TEST_CASE("unknown url yields not-found without a log entry") {
  Fixture fx;
  AttributeKey key{fx.owner, {"medical"}};
  try {
    fx.store.retrieve("cloud://nope/1/00", key, fx.clock);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_found);
  }
  CHECK(fx.store.audit_log().empty());
}

TEST_CASE("repeated stores of the same part get distinct urls and keys") {
  Fixture fx;
  std::string u1 = fx.store.store(fx.owner, 2, fx.kept.at(2), fx.digest_of(2), fx.tag,
                                  simple_policy(), fx.esig, fx.clock);
  std::string u2 = fx.store.store(fx.owner, 2, fx.kept.at(2), fx.digest_of(2), fx.tag,
                                  simple_policy(), fx.esig, fx.clock);
  CHECK(u1 != u2);
  CHECK(fx.store.triple(u1).data_ct != fx.store.triple(u2).data_ct);
  CHECK(fx.store.triple(u1).wrapped_key != fx.store.triple(u2).wrapped_key);
  CHECK(fx.store.size() == 2);
}

TEST_CASE("part index outside 1..7 is rejected") {
  Fixture fx;
  CHECK_THROWS_AS(fx.store.store(fx.owner, 0, fx.kept.at(2), fx.digest_of(2), fx.tag,
                                 simple_policy(), fx.esig, fx.clock),
                  Error);
  CHECK_THROWS_AS(fx.store.store(fx.owner, 8, fx.kept.at(2), fx.digest_of(2), fx.tag,
                                 simple_policy(), fx.esig, fx.clock),
                  Error);
}

TEST_CASE("corrupted storage fails authenticated decryption and never leaks") {
  Fixture fx;
  std::string url = fx.store.store(fx.owner, 5, fx.kept.at(5), fx.digest_of(5), fx.tag,
                                   simple_policy(), fx.esig, fx.clock);
  AttributeKey key{fx.owner, {"medical", "research"}};

  size_t len = fx.store.triple(url).data_ct.size();
  for (size_t pos : {size_t{0}, len / 2, len - 1}) {
    CloudStore fresh{Rng(911)};
    ManualClock clock{50};
    std::string u = fresh.store(fx.owner, 5, fx.kept.at(5), fx.digest_of(5), fx.tag,
                                simple_policy(), fx.esig, clock);
    fresh.corrupt_data(u, pos, 0x01);
    try {
      fresh.retrieve(u, key, clock);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::decrypt);
    }
    auto log = fresh.audit_log();
    REQUIRE(log.size() == 2);
    CHECK(log[1].action == LogAction::retrieve_denied);
  }
  (void)url;
}

TEST_CASE("every retrieve writes exactly one log entry, in time order") {
  Fixture fx;
  std::string url = fx.store.store(fx.owner, 2, fx.kept.at(2), fx.digest_of(2), fx.tag,
                                   simple_policy(), fx.esig, fx.clock);
  AttributeKey good{fx.owner, {"medical", "clinic"}};
  AttributeKey bad{fx.owner, {"janitor"}};

  for (int i = 0; i < 3; ++i) {
    fx.clock.advance(100);
    fx.store.retrieve(url, good, fx.clock);
    fx.clock.advance(100);
    CHECK_THROWS_AS(fx.store.retrieve(url, bad, fx.clock), Error);
  }

  auto log = fx.store.audit_log();
  REQUIRE(log.size() == 7);
  for (size_t i = 1; i < log.size(); ++i) CHECK(log[i - 1].t <= log[i].t);
  int granted = 0, denied = 0;
  for (const auto& e : log) {
    if (e.action == LogAction::retrieve_granted) ++granted;
    if (e.action == LogAction::retrieve_denied) ++denied;
  }
  CHECK(granted == 3);
  CHECK(denied == 3);
}

TEST_CASE("audit log filters by actor, url, and time window") {
  Fixture fx;
  std::string u1 = fx.store.store(fx.owner, 2, fx.kept.at(2), fx.digest_of(2), fx.tag,
                                  simple_policy(), fx.esig, fx.clock);
  AccountId other = emr::account_id_for(Bigint(777));
  AttributeKey k1{fx.owner, {"medical", "clinic"}};
  AttributeKey k2{other, {"medical", "research"}};

  fx.clock.set(2000);
  fx.store.retrieve(u1, k1, fx.clock);
  fx.clock.set(3000);
  fx.store.retrieve(u1, k2, fx.clock);

  LogFilter by_actor;
  by_actor.actor = other;
  auto rows = fx.store.audit_log(by_actor);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].t == 3000);

  LogFilter by_window;
  by_window.from = 1500;
  by_window.until = 2000;
  rows = fx.store.audit_log(by_window);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].actor == fx.owner);

  LogFilter by_url;
  by_url.url = u1;
  CHECK(fx.store.audit_log(by_url).size() == 3);
}

TEST_CASE("log clock must never run backwards") {
  Fixture fx;
  fx.clock.set(5000);
  fx.store.store(fx.owner, 2, fx.kept.at(2), fx.digest_of(2), fx.tag, simple_policy(),
                 fx.esig, fx.clock);
  fx.clock.set(4000);
  CHECK_THROWS_AS(fx.store.store(fx.owner, 3, fx.kept.at(3), fx.digest_of(3), fx.tag,
                                 simple_policy(), fx.esig, fx.clock),
                  Error);
}

TEST_CASE("retrieved signature still verifies against the kept parts") {
  Fixture fx;
  AttributeKey key{fx.owner, {"medical", "research"}};
  std::map<int, std::string> urls;
  for (int i : {2, 3, 5}) {
    urls[i] = fx.store.store(fx.owner, i, fx.kept.at(i), fx.digest_of(i), fx.tag,
                             simple_policy(), fx.esig, fx.clock);
  }
  ces::PartMap fetched;
  ces::ExtractedSignature esig = fx.esig;
  for (auto& [i, url] : urls) {
    fx.clock.advance(1);
    RetrievedPart part = fx.store.retrieve(url, key, fx.clock);
    fetched[i] = part.m;
    esig = part.esig;
  }
  CHECK(ces::verify_extracted(fx.kp.public_key(), fetched, esig));
}

TEST_CASE("dumps list every triple and log row") {
  Fixture fx;
  std::string url = fx.store.store(fx.owner, 2, fx.kept.at(2), fx.digest_of(2), fx.tag,
                                   simple_policy(), fx.esig, fx.clock);
  AttributeKey key{fx.owner, {"medical", "clinic"}};
  fx.clock.advance(5);
  fx.store.retrieve(url, key, fx.clock);

  std::string triples = fx.store.dump_triples();
  CHECK(triples.find(url) != std::string::npos);
  CHECK(triples.find("(medical AND (research OR clinic))") != std::string::npos);

  std::string log = fx.store.dump_log();
  CHECK(log.find("store") != std::string::npos);
  CHECK(log.find("retrieve-granted") != std::string::npos);
}
