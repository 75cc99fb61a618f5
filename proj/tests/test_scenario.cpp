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

#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"

#include "bpds/scenario.hpp"

using namespace bpds;
using namespace bpds::sim;

namespace {

const char* kFullText = R"json({
  "name": "clinic",
  "profile": "test",
  "seed": 42,
  "end_time": 300000,
  "net": {"base_delay": 5, "jitter": 2, "drop_rate": 0.0},
  "nodes": {"count": 55, "initial_credit": 90},
  "ceas": [2, 3, 5],
  "policy": {"all": ["medical", {"any": ["lab", "clinic"]}]},
  "actors": [
    {"label": "dr", "role": "doctor", "attributes": ["medical"]},
    {"label": "pat", "role": "patient"},
    {"label": "lab", "role": "user", "attributes": ["medical", "lab"]}
  ],
  "timeline": [
    {"t": 1000, "event": "visit", "doctor": "dr", "patient": "pat"},
    {"t": 15000, "event": "release", "patient": "pat", "parts": [1, 2, 3, 4, 5, 6, 7]},
    {"t": 30000, "event": "grant", "patient": "pat", "grantee": "lab",
     "parts": [2, 3, 5, 6], "actions": ["read", "copy"], "from": 0, "until": 300000},
    {"t": 45000, "event": "request", "requester": "lab", "patient": "pat",
     "parts": [2, 3, 5, 6], "action": "read"},
    {"t": 60000, "event": "revoke", "patient": "pat", "grantee": "lab"}
  ],
  "faults": [
    {"kind": "crash", "node": 3, "at": 100000},
    {"kind": "recover", "node": 3, "at": 150000},
    {"kind": "byzantine-audit", "node": 40, "from": 50000, "until": 90000}
  ],
  "tamper": {"height": 4}
})json";

Errc parse_error(const std::string& text) {
  try {
    Scenario::from_json_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure");
  return Errc::parse;
}

std::string parse_error_text(const std::string& text) {
  try {
    Scenario::from_json_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected a parse failure");
  return {};
}

}  // namespace

TEST_CASE("full scenario text parses into every field") {
  Scenario s = Scenario::from_json_text(kFullText);

  CHECK(s.name == "clinic");
  CHECK(s.profile == "test");
  CHECK(s.seed == 42);
  CHECK(s.end_time == 300000);
  CHECK(s.net.base_delay == 5);
  CHECK(s.net.jitter == 2);
  CHECK(s.net.drop_rate == 0.0);
  CHECK(s.node_count == 55);
  CHECK(s.initial_credit == 90);
  CHECK(s.ceas.indices() == std::vector<int>{2, 3, 5});
  CHECK(s.policy.render() == "(medical AND (lab OR clinic))");

  REQUIRE(s.actors.size() == 3);
  CHECK(s.actors[0].label == "dr");
  CHECK(s.actors[0].role == emr::Role::doctor);
  CHECK(s.actors[1].role == emr::Role::patient);
  CHECK(s.actors[2].attributes == std::set<std::string>{"lab", "medical"});

  REQUIRE(s.timeline.size() == 5);
  CHECK(s.timeline[0].kind == EventKind::visit);
  CHECK(s.timeline[0].doctor == "dr");
  CHECK(s.timeline[1].kind == EventKind::release);
  CHECK(s.timeline[1].parts == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
  CHECK(s.timeline[2].kind == EventKind::grant);
  CHECK(s.timeline[2].actions ==
        std::vector<contract::Action>{contract::Action::read, contract::Action::copy});
  CHECK(s.timeline[2].from == 0);
  CHECK(s.timeline[2].until == 300000);
  CHECK(s.timeline[3].kind == EventKind::request);
  CHECK(s.timeline[3].action == contract::Action::read);
  CHECK(s.timeline[4].kind == EventKind::revoke);

  REQUIRE(s.faults.size() == 3);
  CHECK(s.faults[0].kind == FaultKind::crash);
  CHECK(s.faults[0].node == NodeId{3});
  CHECK(s.faults[0].at == 100000);
  CHECK(s.faults[1].kind == FaultKind::recover);
  CHECK(s.faults[2].kind == FaultKind::byzantine_audit);
  CHECK(s.faults[2].from == 50000);
  CHECK(s.faults[2].until == 90000);

  REQUIRE(s.tamper_height.has_value());
  CHECK(*s.tamper_height == 4);

  CHECK(s.find_actor("lab") != nullptr);
  CHECK(s.find_actor("lab")->role == emr::Role::user);
  CHECK(s.find_actor("ghost") == nullptr);
}

TEST_CASE("minimal scenario falls back to defaults") {
  Scenario s = Scenario::from_json_text(R"({"name": "min"})");
  CHECK(s.profile == "test");
  CHECK(s.seed == 1);
  CHECK(s.end_time == 300000);
  CHECK(s.node_count == 50);
  CHECK(s.initial_credit == 100);
  CHECK(s.ceas.indices() == std::vector<int>{2, 3, 5});
  CHECK(s.policy.render() == "medical");
  CHECK(s.actors.empty());
  CHECK(s.timeline.empty());
  CHECK(s.faults.empty());
  CHECK_FALSE(s.tamper_height.has_value());
  CHECK(s.group().p == test_profile().p);
}

TEST_CASE("profile selects the group parameters") {
  Scenario s = Scenario::from_json_text(R"({"name": "p", "profile": "production"})");
  CHECK(s.group().p == production_profile().p);
  CHECK(s.group().g == production_profile().g);
}

TEST_CASE("policy node forms") {
  Scenario leaf = Scenario::from_json_text(R"({"name": "x", "policy": "nurse"})");
  CHECK(leaf.policy.render() == "nurse");

  Scenario kof = Scenario::from_json_text(
      R"({"name": "x", "policy": {"k": 2, "of": ["a", "b", "c"]}})");
  CHECK(kof.policy.render() == "2-of(a,b,c)");

  CHECK(parse_error(R"({"name": "x", "policy": 7})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "policy": {"all": []}})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "policy": {"k": "two", "of": ["a"]}})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "policy": {"none": ["a"]}})") == Errc::parse);
}

TEST_CASE("malformed documents are parse errors") {
  CHECK(parse_error("{ not json") == Errc::parse);
  CHECK(parse_error(R"(["array"])") == Errc::parse);
  CHECK(parse_error(R"({"profile": "test"})") == Errc::parse);  // no name
  CHECK(parse_error_text(R"({"name": "x", "extra": 1})") ==
        "parse: unknown scenario field 'extra'");
  CHECK(parse_error(R"({"name": "x", "seed": "abc"})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "ceas": [2, "three"]})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "ceas": [2, 9]})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "net": {"drop_rate": "high"}})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "actors": [{"label": "a", "role": "admin"}]})") ==
        Errc::parse);
  CHECK(parse_error(R"({"name": "x", "tamper": {"height": -1}})") == Errc::parse);
}

TEST_CASE("structural validation rejections") {
  CHECK(parse_error(R"({"name": "x", "profile": "staging"})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "nodes": {"count": 49}})") == Errc::parse);
  CHECK(parse_error(R"({"name": "x", "nodes": {"count": 50, "initial_credit": 0}})") ==
        Errc::parse);
  CHECK(parse_error(R"({"name": "x", "end_time": 0})") == Errc::parse);
  // net limits keep their own error domain
  CHECK(parse_error(R"({"name": "x", "net": {"drop_rate": 1.5}})") == Errc::parameter);

  CHECK(parse_error_text(R"({"name": "x", "actors": [
    {"label": "a", "role": "user"}, {"label": "a", "role": "user"}]})") ==
        "parse: duplicate actor label 'a'");
}

TEST_CASE("timeline references must resolve to the right roles") {
  const char* ghost_doctor = R"({"name": "x",
    "actors": [{"label": "pat", "role": "patient"}],
    "timeline": [{"t": 0, "event": "visit", "doctor": "dr", "patient": "pat"}]})";
  CHECK(parse_error_text(ghost_doctor) == "parse: visit doctor 'dr' is not an actor");

  const char* wrong_role = R"({"name": "x",
    "actors": [{"label": "dr", "role": "doctor"}, {"label": "pat", "role": "patient"}],
    "timeline": [{"t": 0, "event": "visit", "doctor": "pat", "patient": "dr"}]})";
  CHECK(parse_error_text(wrong_role) == "parse: visit doctor 'pat' must have role doctor");

  const char* user_as_patient = R"({"name": "x",
    "actors": [{"label": "u", "role": "user"}],
    "timeline": [{"t": 0, "event": "release", "patient": "u", "parts": [1]}]})";
  CHECK(parse_error(user_as_patient) == Errc::parse);
}

TEST_CASE("timeline ordering and part lists are checked") {
  const char* unordered = R"({"name": "x",
    "actors": [{"label": "pat", "role": "patient"}],
    "timeline": [
      {"t": 2000, "event": "release", "patient": "pat", "parts": [1]},
      {"t": 1000, "event": "release", "patient": "pat", "parts": [2]}]})";
  CHECK(parse_error_text(unordered) == "parse: timeline must be time-ordered");

  const char* late = R"({"name": "x", "end_time": 1000,
    "actors": [{"label": "pat", "role": "patient"}],
    "timeline": [{"t": 1001, "event": "release", "patient": "pat", "parts": [1]}]})";
  CHECK(parse_error_text(late) == "parse: timeline event past end_time");

  const char* descending = R"({"name": "x",
    "actors": [{"label": "pat", "role": "patient"}],
    "timeline": [{"t": 0, "event": "release", "patient": "pat", "parts": [3, 2]}]})";
  CHECK(parse_error_text(descending) == "parse: release parts must be strictly ascending");

  const char* out_of_range = R"({"name": "x",
    "actors": [{"label": "pat", "role": "patient"}],
    "timeline": [{"t": 0, "event": "release", "patient": "pat", "parts": [0, 1]}]})";
  CHECK(parse_error_text(out_of_range) == "parse: release parts must lie in 1..7");

  const char* empty_parts = R"({"name": "x",
    "actors": [{"label": "pat", "role": "patient"}],
    "timeline": [{"t": 0, "event": "release", "patient": "pat", "parts": []}]})";
  CHECK(parse_error_text(empty_parts) == "parse: release parts must name at least one part");
}

TEST_CASE("grant windows, visits, and faults are checked") {
  const char* bad_window = R"({"name": "x",
    "actors": [{"label": "pat", "role": "patient"}, {"label": "u", "role": "user"}],
    "timeline": [{"t": 0, "event": "grant", "patient": "pat", "grantee": "u",
                  "parts": [1], "actions": ["read"], "from": 50, "until": 50}]})";
  CHECK(parse_error_text(bad_window) == "parse: grant window must have from < until");

  const char* short_text = R"({"name": "x",
    "actors": [{"label": "dr", "role": "doctor"}, {"label": "pat", "role": "patient"}],
    "timeline": [{"t": 0, "event": "visit", "doctor": "dr", "patient": "pat",
                  "parts_text": ["only", "three", "entries"]}]})";
  CHECK(parse_error_text(short_text) == "parse: parts_text must hold exactly 7 entries");

  CHECK(parse_error_text(R"({"name": "x",
    "faults": [{"kind": "crash", "node": 50, "at": 0}]})") ==
        "parse: fault names a node outside the roster");
  CHECK(parse_error_text(R"({"name": "x",
    "faults": [{"kind": "byzantine-audit", "node": 0, "from": 9, "until": 9}]})") ==
        "parse: byzantine window must have from < until");
  CHECK(parse_error(R"({"name": "x",
    "faults": [{"kind": "meltdown", "node": 0, "at": 0}]})") == Errc::parse);
}

TEST_CASE("load reads a file and reports a missing one") {
  std::string path = "scenario_test_tmp.json";
  {
    std::ofstream out(path, std::ios::binary);
    out << kFullText;
  }
  Scenario s = Scenario::load(path);
  CHECK(s.name == "clinic");
  CHECK(s.node_count == 55);
  std::remove(path.c_str());

  try {
    Scenario::load("does_not_exist.json");
    FAIL("expected a not_found failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_found);
  }
}
