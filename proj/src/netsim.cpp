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

#include "bpds/netsim.hpp"

#include <algorithm>

#include "bpds/errors.hpp"

namespace bpds::net {

void NetConfig::validate() const {
  if (base_delay < 0) fail(Errc::parameter, "base delay must be non-negative");
  if (jitter < 0) fail(Errc::parameter, "jitter must be non-negative");
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) {
    fail(Errc::parameter, "drop rate must be within [0,1]");
  }
}

Simulator::Simulator(NetConfig config, uint64_t seed) : config_(config), rng_(seed) {
  config_.validate();
}

void Simulator::register_node(NodeId id, Handler handler) {
  if (!handler) fail(Errc::parameter, "node handler must be callable");
  if (!handlers_.emplace(id, std::move(handler)).second) {
    fail(Errc::parameter, "node already registered");
  }
}

Time Simulator::draw_delay() {
  Time delay = config_.base_delay;
  if (config_.jitter > 0) {
    uint64_t span = static_cast<uint64_t>(config_.jitter);
    uint64_t draw = rng_.next_below(2 * span + 1);  // [0, 2*jitter]
    delay += static_cast<Time>(draw) - config_.jitter;
  }
  return std::max<Time>(0, delay);
}

void Simulator::push_event(Time at, std::function<void()> run) {
  events_.push(Event{at, next_seq_++, std::move(run)});
}

bool Simulator::send(NodeId from, NodeId to, ByteView payload, const std::string& label) {
  auto it = handlers_.find(to);
  if (it == handlers_.end()) {
    fail(Errc::routing, "unknown destination node " + std::to_string(to.value));
  }
  if (config_.drop_rate > 0.0 && rng_.chance(config_.drop_rate)) {
    trace_.push_back("t=" + std::to_string(now_) + " drop from=" + std::to_string(from.value) +
                     " to=" + std::to_string(to.value) + " label=" + label +
                     " bytes=" + std::to_string(payload.size()));
    return false;
  }
  Time at = now_ + draw_delay();
  trace_.push_back("t=" + std::to_string(now_) + " send from=" + std::to_string(from.value) +
                   " to=" + std::to_string(to.value) + " label=" + label +
                   " bytes=" + std::to_string(payload.size()) +
                   " deliver_at=" + std::to_string(at));
  Bytes copy(payload.begin(), payload.end());
  Handler* handler = &it->second;
  push_event(at, [from, handler, copy = std::move(copy)]() {
    (*handler)(from, ByteView(copy.data(), copy.size()));
  });
  return true;
}

int Simulator::broadcast(NodeId from, const std::vector<NodeId>& to, ByteView payload,
                         const std::string& label) {
  int scheduled = 0;
  for (NodeId dest : to) {
    if (send(from, dest, payload, label)) ++scheduled;
  }
  return scheduled;
}

void Simulator::schedule_at(Time t, const std::string& label, std::function<void()> action) {
  if (t < now_) fail(Errc::scheduling, "timer scheduled in the past");
  if (!action) fail(Errc::parameter, "timer action must be callable");
  trace_.push_back("t=" + std::to_string(now_) + " timer at=" + std::to_string(t) +
                   " label=" + label);
  push_event(t, std::move(action));
}

void Simulator::run_until(Time t_end) {
  if (t_end < now_) fail(Errc::scheduling, "cannot run the clock backwards");
  while (!events_.empty() && events_.top().at <= t_end) {
    Event event = events_.top();
    events_.pop();
    now_ = event.at;
    event.run();
    if (post_event_) post_event_();
  }
  now_ = t_end;
}

}  // namespace bpds::net
