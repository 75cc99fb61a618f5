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

#include "bpds/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bpds/errors.hpp"

namespace bpds::sim {

using nlohmann::json;

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::visit: return "visit";
    case EventKind::release: return "release";
    case EventKind::grant: return "grant";
    case EventKind::revoke: return "revoke";
    case EventKind::request: return "request";
  }
  return "?";
}

const char* fault_kind_name(FaultKind kind) {
  switch (kind) {
    case FaultKind::crash: return "crash";
    case FaultKind::recover: return "recover";
    case FaultKind::byzantine_audit: return "byzantine-audit";
  }
  return "?";
}

namespace {

[[noreturn]] void bad(const std::string& what) { fail(Errc::parse, what); }

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

int64_t int_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
  return v.get<int64_t>();
}

std::string str_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<int> int_list(const json& v, const char* what) {
  if (!v.is_array()) bad(std::string(what) + " must be an array of integers");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) bad(std::string(what) + " must hold only integers");
    out.push_back(e.get<int>());
  }
  return out;
}

contract::Action action_from_name(const std::string& name) {
  if (name == "read") return contract::Action::read;
  if (name == "write") return contract::Action::write;
  if (name == "copy") return contract::Action::copy;
  bad("unknown action '" + name + "'");
}

emr::Role role_from_name(const std::string& name) {
  if (name == "doctor") return emr::Role::doctor;
  if (name == "patient") return emr::Role::patient;
  if (name == "user") return emr::Role::user;
  bad("unknown role '" + name + "' (actors are doctor, patient, or user)");
}

/// Policy nodes: a bare string is a leaf; {"all": [...]}, {"any": [...]}
/// and {"k": n, "of": [...]} build the interior nodes.
cloud::AccessPolicy policy_from_json(const json& v) {
  if (v.is_string()) return cloud::AccessPolicy::leaf(v.get<std::string>());
  if (!v.is_object()) bad("policy nodes are strings or objects");

  auto children_of = [](const json& arr) {
    if (!arr.is_array() || arr.empty()) bad("policy children must be a non-empty array");
    std::vector<cloud::AccessPolicy> out;
    for (const json& c : arr) out.push_back(policy_from_json(c));
    return out;
  };

  if (v.contains("all")) return cloud::AccessPolicy::all_of(children_of(v["all"]));
  if (v.contains("any")) return cloud::AccessPolicy::any_of(children_of(v["any"]));
  if (v.contains("k")) {
    if (!v["k"].is_number_integer()) bad("threshold 'k' must be an integer");
    return cloud::AccessPolicy::k_of(v["k"].get<int>(), children_of(field(v, "of")));
  }
  bad("policy object needs 'all', 'any', or 'k'/'of'");
}

TimelineEvent event_from_json(const json& v) {
  TimelineEvent e;
  e.t = int_field(v, "t");
  std::string kind = str_field(v, "event");
  if (kind == "visit") {
    e.kind = EventKind::visit;
    e.doctor = str_field(v, "doctor");
    e.patient = str_field(v, "patient");
    if (v.contains("parts_text")) {
      for (const json& s : v["parts_text"]) {
        if (!s.is_string()) bad("parts_text must hold strings");
        e.parts_text.push_back(s.get<std::string>());
      }
    }
  } else if (kind == "release") {
    e.kind = EventKind::release;
    e.patient = str_field(v, "patient");
    e.parts = int_list(field(v, "parts"), "release parts");
  } else if (kind == "grant") {
    e.kind = EventKind::grant;
    e.patient = str_field(v, "patient");
    e.grantee = str_field(v, "grantee");
    e.parts = int_list(field(v, "parts"), "grant parts");
    const json& actions = field(v, "actions");
    if (!actions.is_array() || actions.empty()) bad("grant actions must be a non-empty array");
    for (const json& a : actions) {
      if (!a.is_string()) bad("grant actions must be names");
      e.actions.push_back(action_from_name(a.get<std::string>()));
    }
    e.from = int_field(v, "from");
    e.until = int_field(v, "until");
  } else if (kind == "revoke") {
    e.kind = EventKind::revoke;
    e.patient = str_field(v, "patient");
    e.grantee = str_field(v, "grantee");
  } else if (kind == "request") {
    e.kind = EventKind::request;
    e.requester = str_field(v, "requester");
    e.patient = str_field(v, "patient");
    e.parts = int_list(field(v, "parts"), "request parts");
    e.action = action_from_name(str_field(v, "action"));
  } else {
    bad("unknown event kind '" + kind + "'");
  }
  return e;
}

Fault fault_from_json(const json& v) {
  Fault f;
  std::string kind = str_field(v, "kind");
  int64_t node = int_field(v, "node");
  if (node < 0) bad("fault node must be non-negative");
  f.node = NodeId{static_cast<uint32_t>(node)};
  if (kind == "crash") {
    f.kind = FaultKind::crash;
    f.at = int_field(v, "at");
  } else if (kind == "recover") {
    f.kind = FaultKind::recover;
    f.at = int_field(v, "at");
  } else if (kind == "byzantine-audit") {
    f.kind = FaultKind::byzantine_audit;
    f.from = int_field(v, "from");
    f.until = int_field(v, "until");
  } else {
    bad("unknown fault kind '" + kind + "'");
  }
  return f;
}

}  // namespace

GroupParams Scenario::group() const {
  return profile == "production" ? production_profile() : test_profile();
}

const ActorSpec* Scenario::find_actor(const std::string& label) const {
  for (const ActorSpec& a : actors) {
    if (a.label == label) return &a;
  }
  return nullptr;
}

void Scenario::validate() const {
  if (name.empty()) fail(Errc::parse, "scenario needs a name");
  if (profile != "test" && profile != "production") {
    fail(Errc::parse, "profile must be test or production");
  }
  if (node_count < 50) fail(Errc::parse, "node roster must hold at least 50 nodes");
  if (initial_credit < 1) fail(Errc::parse, "initial credit must be positive");
  if (end_time <= 0) fail(Errc::parse, "end_time must be positive");
  net.validate();
  policy.validate();

  std::map<std::string, const ActorSpec*> by_label;
  for (const ActorSpec& a : actors) {
    if (a.label.empty()) fail(Errc::parse, "actor labels must be non-empty");
    if (!by_label.emplace(a.label, &a).second) {
      fail(Errc::parse, "duplicate actor label '" + a.label + "'");
    }
  }

  auto need = [&](const std::string& label, emr::Role role, const char* slot) {
    auto it = by_label.find(label);
    if (it == by_label.end()) {
      fail(Errc::parse, std::string(slot) + " '" + label + "' is not an actor");
    }
    if (it->second->role != role) {
      fail(Errc::parse, std::string(slot) + " '" + label + "' must have role " +
                            emr::role_name(role));
    }
  };
  auto parts_ok = [](const std::vector<int>& parts, const char* what) {
    if (parts.empty()) fail(Errc::parse, std::string(what) + " must name at least one part");
    for (size_t j = 0; j < parts.size(); ++j) {
      if (parts[j] < 1 || parts[j] > static_cast<int>(ces::kParts)) {
        fail(Errc::parse, std::string(what) + " must lie in 1..7");
      }
      if (j > 0 && parts[j] <= parts[j - 1]) {
        fail(Errc::parse, std::string(what) + " must be strictly ascending");
      }
    }
  };

  Time last = 0;
  for (const TimelineEvent& e : timeline) {
    if (e.t < last) fail(Errc::parse, "timeline must be time-ordered");
    if (e.t > end_time) fail(Errc::parse, "timeline event past end_time");
    last = e.t;
    switch (e.kind) {
      case EventKind::visit:
        need(e.doctor, emr::Role::doctor, "visit doctor");
        need(e.patient, emr::Role::patient, "visit patient");
        if (!e.parts_text.empty() && e.parts_text.size() != ces::kParts) {
          fail(Errc::parse, "parts_text must hold exactly 7 entries");
        }
        break;
      case EventKind::release:
        need(e.patient, emr::Role::patient, "release patient");
        parts_ok(e.parts, "release parts");
        break;
      case EventKind::grant:
        need(e.patient, emr::Role::patient, "grant patient");
        need(e.grantee, emr::Role::user, "grantee");
        parts_ok(e.parts, "grant parts");
        if (e.from >= e.until) fail(Errc::parse, "grant window must have from < until");
        break;
      case EventKind::revoke:
        need(e.patient, emr::Role::patient, "revoke patient");
        need(e.grantee, emr::Role::user, "revoke grantee");
        break;
      case EventKind::request:
        need(e.requester, emr::Role::user, "requester");
        need(e.patient, emr::Role::patient, "request patient");
        parts_ok(e.parts, "request parts");
        break;
    }
  }

  for (const Fault& f : faults) {
    if (f.node.value >= static_cast<uint32_t>(node_count)) {
      fail(Errc::parse, "fault names a node outside the roster");
    }
    if (f.kind == FaultKind::byzantine_audit && f.from >= f.until) {
      fail(Errc::parse, "byzantine window must have from < until");
    }
  }
}

Scenario Scenario::from_json_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) bad("scenario is not valid JSON");
  if (!doc.is_object()) bad("scenario must be a JSON object");

  static const std::set<std::string> known = {
      "name", "profile", "seed",  "end_time", "net",      "nodes",
      "ceas", "policy",  "actors", "timeline", "faults",   "tamper"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) bad("unknown scenario field '" + it.key() + "'");
  }

  Scenario s;
  s.name = str_field(doc, "name");
  if (doc.contains("profile")) s.profile = str_field(doc, "profile");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      bad("seed must be an integer");
    }
    s.seed = doc["seed"].get<uint64_t>();
  }
  if (doc.contains("end_time")) s.end_time = int_field(doc, "end_time");

  if (doc.contains("net")) {
    const json& n = doc["net"];
    if (!n.is_object()) bad("net must be an object");
    if (n.contains("base_delay")) s.net.base_delay = int_field(n, "base_delay");
    if (n.contains("jitter")) s.net.jitter = int_field(n, "jitter");
    if (n.contains("drop_rate")) {
      if (!n["drop_rate"].is_number()) bad("drop_rate must be a number");
      s.net.drop_rate = n["drop_rate"].get<double>();
    }
  }

  if (doc.contains("nodes")) {
    const json& n = doc["nodes"];
    if (!n.is_object()) bad("nodes must be an object");
    s.node_count = static_cast<int>(int_field(n, "count"));
    if (n.contains("initial_credit")) {
      s.initial_credit = static_cast<int>(int_field(n, "initial_credit"));
    }
  }

  if (doc.contains("ceas")) {
    std::vector<int> raw = int_list(doc["ceas"], "ceas");
    try {
      s.ceas = ces::Ceas(raw);
    } catch (const Error& e) {
      bad(std::string("ceas: ") + e.what());
    }
  }
  if (doc.contains("policy")) s.policy = policy_from_json(doc["policy"]);

  if (doc.contains("actors")) {
    if (!doc["actors"].is_array()) bad("actors must be an array");
    for (const json& a : doc["actors"]) {
      if (!a.is_object()) bad("each actor must be an object");
      ActorSpec spec;
      spec.label = str_field(a, "label");
      spec.role = role_from_name(str_field(a, "role"));
      if (a.contains("attributes")) {
        if (!a["attributes"].is_array()) bad("attributes must be an array");
        for (const json& attr : a["attributes"]) {
          if (!attr.is_string()) bad("attributes must be strings");
          spec.attributes.insert(attr.get<std::string>());
        }
      }
      s.actors.push_back(std::move(spec));
    }
  }

  if (doc.contains("timeline")) {
    if (!doc["timeline"].is_array()) bad("timeline must be an array");
    for (const json& e : doc["timeline"]) s.timeline.push_back(event_from_json(e));
  }
  if (doc.contains("faults")) {
    if (!doc["faults"].is_array()) bad("faults must be an array");
    for (const json& f : doc["faults"]) s.faults.push_back(fault_from_json(f));
  }
  if (doc.contains("tamper")) {
    const json& t = doc["tamper"];
    if (!t.is_object()) bad("tamper must be an object");
    int64_t h = int_field(t, "height");
    if (h < 0) bad("tamper height must be non-negative");
    s.tamper_height = static_cast<uint64_t>(h);
  }

  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::not_found, "cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

}  // namespace bpds::sim
