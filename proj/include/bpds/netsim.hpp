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

#include <functional>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "bpds/clock.hpp"
#include "bpds/rng.hpp"
#include "bpds/types.hpp"

namespace bpds::net {

struct NetConfig {
  Time base_delay = 50;
  Time jitter = 0;       // delivery at base +/- uniform[0, jitter]
  double drop_rate = 0.0;

  void validate() const;  // delays >= 0, drop_rate in [0,1]
};

/// Single-threaded discrete-event network. Events run in (deliver_at,
/// seq) order; the clock is the event being processed. All randomness
/// (jitter, drops) comes from one seeded stream, so a (seed, config,
/// script) triple fully determines the trace.
class Simulator : public Clock {
 public:
  using Handler = std::function<void(NodeId from, ByteView payload)>;

  Simulator(NetConfig config, uint64_t seed);

  Time now() const override { return now_; }
  Rng& rng() { return rng_; }

  void register_node(NodeId id, Handler handler);
  bool is_registered(NodeId id) const { return handlers_.count(id) > 0; }

  /// Queues a delivery (or drops it). Returns true when the message was
  /// scheduled. Unknown destination is a routing error.
  bool send(NodeId from, NodeId to, ByteView payload, const std::string& label);

  /// Independent per-receiver delay and drop draws, in destination order.
  /// Returns the number of scheduled deliveries.
  int broadcast(NodeId from, const std::vector<NodeId>& to, ByteView payload,
                const std::string& label);

  /// Timer: runs `action` at simulated time t (>= now).
  void schedule_at(Time t, const std::string& label, std::function<void()> action);

  /// Processes every event with deliver_at <= t_end, then parks the clock
  /// at t_end.
  void run_until(Time t_end);

  bool idle() const { return events_.empty(); }
  size_t pending() const { return events_.size(); }

  /// Line per send/broadcast leg and timer, written at scheduling time.
  const std::vector<std::string>& trace() const { return trace_; }

  /// Invoked after every processed event (replica safety checks).
  void set_post_event_hook(std::function<void()> hook) { post_event_ = std::move(hook); }

 private:
  struct Event {
    Time at = 0;
    uint64_t seq = 0;
    std::function<void()> run;
  };
  struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  Time draw_delay();
  void push_event(Time at, std::function<void()> run);

  NetConfig config_;
  Rng rng_;
  Time now_ = 0;
  uint64_t next_seq_ = 0;
  std::map<NodeId, Handler> handlers_;
  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::vector<std::string> trace_;
  std::function<void()> post_event_;
};

}  // namespace bpds::net
