//
// Copyright 2026 The Legion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LEGION_NETSIM_HPP_
#define LEGION_NETSIM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "legion/bytes.hpp"
#include "legion/rng.hpp"

namespace legion {

// Deterministic discrete-event simulator of a partially synchronous,
// unreliable network: before GST messages may be dropped, duplicated, and
// delayed within [delay_min, delay_max]; from GST on, faults cease and every
// message arrives within delta_bound ticks. Reordering falls out of the
// random delays. Integer ticks and a seeded generator make whole traces
// byte-reproducible.

struct NetworkConfig {
  double drop_prob = 0.0;
  double dup_prob = 0.0;
  uint64_t delay_min = 1;
  uint64_t delay_max = 1;
  uint64_t gst = 0;          // tick at which partial synchrony begins
  uint64_t delta_bound = 1;  // max delivery delay from GST on
  uint64_t seed = 0;

  // Throws ConfigInvalid: probabilities in [0,1], 1 <= delay_min <=
  // delay_max, delta_bound >= 1. delay_min >= 1 keeps every delivery
  // strictly after its send.
  void check() const;
};

enum class SimEventKind : uint8_t { Send, Deliver, Drop, Duplicate, TimerFire };

struct SimEvent {
  uint64_t tick = 0;
  SimEventKind kind = SimEventKind::Send;
  uint32_t src = 0;
  uint32_t dst = 0;
  Digest payload_digest{};
  uint64_t msg_id = 0;
};

const char* to_string(SimEventKind kind);

class Simulator;

// Destination-side handler. Handlers run sequentially inside step(); they may
// send further messages and set timers on the simulator they are given.
class SimNode {
 public:
  virtual ~SimNode() = default;
  virtual void on_message(Simulator& sim, uint32_t src, const Bytes& payload, uint64_t msg_id) = 0;
  virtual void on_timer(Simulator& /*sim*/, const Bytes& /*payload*/) {}
};

class Simulator {
 public:
  explicit Simulator(const NetworkConfig& config);

  void register_node(uint32_t node_id, SimNode* node);  // node outlives the simulator run

  // Queues a message subject to the fault model; returns its msg_id.
  // Throws UnknownNode for unregistered endpoints.
  uint64_t send(uint32_t src, uint32_t dst, Bytes payload);

  // Schedules a TimerFire for the node at fire_tick (>= now).
  void set_timer(uint32_t node_id, uint64_t fire_tick, Bytes payload);

  // Pops the earliest queued event (ties broken by insertion order),
  // advances the clock, invokes the destination handler. nullopt when idle.
  std::optional<SimEvent> step();

  // Steps until the queue is empty or the next event is past tick_limit.
  void run_until(uint64_t tick_limit);

  uint64_t now() const { return now_; }
  const std::vector<SimEvent>& trace() const { return trace_; }
  size_t in_flight_messages() const;

  // "tick,kind,src,dst,msg_id" rows, header included.
  std::string trace_csv() const;

 private:
  struct Queued {
    uint64_t tick;
    uint64_t insertion;  // tie-break
    SimEventKind kind;   // Deliver or TimerFire
    uint32_t src, dst;
    Bytes payload;
    uint64_t msg_id;
  };
  struct QueuedAfter {
    bool operator()(const Queued& a, const Queued& b) const {
      if (a.tick != b.tick) return a.tick > b.tick;
      return a.insertion > b.insertion;
    }
  };

  void push(Queued q);

  NetworkConfig config_;
  uint64_t now_ = 0;
  uint64_t next_msg_id_ = 0;
  uint64_t next_insertion_ = 0;
  std::priority_queue<Queued, std::vector<Queued>, QueuedAfter> queue_;
  std::map<uint32_t, SimNode*> nodes_;
  std::vector<SimEvent> trace_;
  Rng rng_;  // fault-model stream, derived from config.seed
};

}  // namespace legion

#endif  // LEGION_NETSIM_HPP_
