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

#include "legion/netsim.hpp"

#include "legion/errors.hpp"
#include "legion/sha256.hpp"

namespace legion {

void NetworkConfig::check() const {
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) throw ConfigInvalid("network.drop_prob");
  if (!(dup_prob >= 0.0 && dup_prob <= 1.0)) throw ConfigInvalid("network.dup_prob");
  if (delay_min < 1) throw ConfigInvalid("network.delay_min: must be >= 1");
  if (delay_min > delay_max) throw ConfigInvalid("network.delay_min > delay_max");
  if (delta_bound < 1) throw ConfigInvalid("network.delta_bound: must be >= 1");
}

const char* to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::Send: return "send";
    case SimEventKind::Deliver: return "deliver";
    case SimEventKind::Drop: return "drop";
    case SimEventKind::Duplicate: return "duplicate";
    case SimEventKind::TimerFire: return "timer";
  }
  return "?";
}

Simulator::Simulator(const NetworkConfig& config)
    : config_(config), rng_(Rng(config.seed).derive("netsim")) {
  config_.check();
}

void Simulator::register_node(uint32_t node_id, SimNode* node) { nodes_[node_id] = node; }

void Simulator::push(Queued q) {
  q.insertion = next_insertion_++;
  queue_.push(std::move(q));
}

uint64_t Simulator::send(uint32_t src, uint32_t dst, Bytes payload) {
  if (!nodes_.contains(src) || !nodes_.contains(dst))
    throw UnknownNode("send: unregistered endpoint");
  uint64_t id = next_msg_id_++;
  Digest pd = sha256(ByteSpan(payload.data(), payload.size()));
  trace_.push_back({now_, SimEventKind::Send, src, dst, pd, id});

  if (now_ < config_.gst) {
    // Fault window: drop, then delay, then possibly one duplicate. Draw
    // order is fixed so traces replay exactly.
    if (rng_.bernoulli(config_.drop_prob)) {
      trace_.push_back({now_, SimEventKind::Drop, src, dst, pd, id});
      return id;
    }
    uint64_t delay = rng_.uniform_int(config_.delay_min, config_.delay_max);
    push({now_ + delay, 0, SimEventKind::Deliver, src, dst, payload, id});
    if (rng_.bernoulli(config_.dup_prob)) {
      trace_.push_back({now_, SimEventKind::Duplicate, src, dst, pd, id});
      uint64_t dup_delay = rng_.uniform_int(config_.delay_min, config_.delay_max);
      push({now_ + dup_delay, 0, SimEventKind::Deliver, src, dst, std::move(payload), id});
    }
  } else {
    // Partial synchrony: no loss, no duplication, delay within delta_bound.
    uint64_t delay = rng_.uniform_int(1, config_.delta_bound);
    push({now_ + delay, 0, SimEventKind::Deliver, src, dst, std::move(payload), id});
  }
  return id;
}

void Simulator::set_timer(uint32_t node_id, uint64_t fire_tick, Bytes payload) {
  if (!nodes_.contains(node_id)) throw UnknownNode("set_timer: unregistered node");
  if (fire_tick < now_) throw ConfigInvalid("set_timer: tick in the past");
  push({fire_tick, 0, SimEventKind::TimerFire, node_id, node_id, std::move(payload), 0});
}

std::optional<SimEvent> Simulator::step() {
  if (queue_.empty()) return std::nullopt;
  Queued q = queue_.top();
  queue_.pop();
  now_ = q.tick;

  Digest pd = sha256(ByteSpan(q.payload.data(), q.payload.size()));
  SimEvent ev{q.tick, q.kind, q.src, q.dst, pd, q.msg_id};
  trace_.push_back(ev);

  SimNode* node = nodes_.at(q.dst);
  if (q.kind == SimEventKind::Deliver) {
    node->on_message(*this, q.src, q.payload, q.msg_id);
  } else {
    node->on_timer(*this, q.payload);
  }
  return ev;
}

void Simulator::run_until(uint64_t tick_limit) {
  while (!queue_.empty() && queue_.top().tick <= tick_limit) step();
}

size_t Simulator::in_flight_messages() const {
  // priority_queue offers no iteration; count via a copy. Only used by
  // audits and tests, never on the hot path.
  auto copy = queue_;
  size_t n = 0;
  while (!copy.empty()) {
    if (copy.top().kind == SimEventKind::Deliver) ++n;
    copy.pop();
  }
  return n;
}

std::string Simulator::trace_csv() const {
  std::string out = "tick,kind,src,dst,msg_id\n";
  for (const SimEvent& e : trace_) {
    out += std::to_string(e.tick);
    out += ',';
    out += to_string(e.kind);
    out += ',';
    out += std::to_string(e.src);
    out += ',';
    out += std::to_string(e.dst);
    out += ',';
    out += std::to_string(e.msg_id);
    out += '\n';
  }
  return out;
}

}  // namespace legion
