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

#include "legion/federation.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "legion/errors.hpp"
#include "legion/exposure.hpp"
#include "legion/sha256.hpp"

namespace legion {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr uint8_t kMsgCtiShare = 0;
constexpr uint8_t kMsgRetraction = 1;

constexpr uint8_t kTimerMitigate = 0;
constexpr uint8_t kTimerSync = 1;
constexpr uint8_t kTimerBackgroundShare = 2;
constexpr uint8_t kTimerInjected = 3;

Bytes encode_cti_share(uint32_t origin_node, uint32_t origin_org, const Digest& ledger_digest,
                       const std::string& stix_line) {
  Bytes out;
  out.push_back(kMsgCtiShare);
  put_u32(out, origin_node);
  put_u32(out, origin_org);
  out.insert(out.end(), ledger_digest.begin(), ledger_digest.end());
  put_field(out, as_bytes(stix_line));
  return out;
}

Bytes encode_retraction(const Digest& digest) {
  Bytes out;
  out.push_back(kMsgRetraction);
  out.insert(out.end(), digest.begin(), digest.end());
  return out;
}

}  // namespace

const char* BehaviorSpec::name() const {
  switch (kind) {
    case Kind::Honest: return "honest";
    case Kind::SemiHonest: return "semi-honest";
    case Kind::Malicious: return "malicious";
  }
  return "?";
}

void ScenarioConfig::check() const {
  if (orgs < 1) throw ConfigInvalid("scenario.orgs: must be >= 1");
  if (its_per_org < 1) throw ConfigInvalid("scenario.its_per_org: must be >= 1");
  if (sync_interval < 1) throw ConfigInvalid("scenario.sync_interval: must be >= 1");
  try {
    network.check();
  } catch (const ConfigInvalid& e) {
    throw ConfigInvalid(std::string("scenario: ") + e.what());
  }
  for (size_t i = 0; i < events.size(); ++i) {
    const InjectedEvent& ev = events[i];
    std::string path = "events[" + std::to_string(i) + "]";
    if (ev.tick >= duration) throw ConfigInvalid(path + ".tick: must be < duration");
    switch (ev.kind) {
      case InjectedEvent::Kind::ZeroDay: {
        if (ev.org >= orgs) throw ConfigInvalid(path + ".org: out of range");
        CtiRecord probe;
        probe.kind = CtiKind::VulnerabilityId;
        probe.value = ev.vuln_id;
        if (!validate(probe).empty())
          throw ConfigInvalid(path + ".vuln_id: not a valid vulnerability id");
        break;
      }
      case InjectedEvent::Kind::Compromise:
      case InjectedEvent::Kind::PoisonDetected:
        if (ev.node >= node_count()) throw ConfigInvalid(path + ".node: out of range");
        break;
    }
  }
  if (exposure) {
    if (exposure->inventory.empty()) throw ConfigInvalid("exposure.inventory: empty");
    if (std::find(exposure->inventory.begin(), exposure->inventory.end(), exposure->prove_item) ==
        exposure->inventory.end())
      throw ConfigInvalid("exposure.prove: item not in inventory");
  }
  if (fl) {
    if (fl->rounds < 1) throw ConfigInvalid("fl.rounds: must be >= 1");
    if (fl->train_n < orgs) throw ConfigInvalid("fl.train_n: too small for org count");
  }
}

// ---------------------------------------------------------------------------
// World state shared by all nodes of a run.

struct ScenarioRunner::World {
  ScenarioConfig cfg;
  Rng master;
  Ledger ledger;
  std::vector<std::array<uint8_t, 32>> node_token;
  std::vector<SanitizationPolicy> intra_policy;  // per org
  std::vector<SanitizationPolicy> inter_policy;
  std::vector<SanitizationPolicy> public_policy;

  std::set<Digest> fabricated;            // ground-truth poison digests
  std::map<Digest, CtiRecord> published;  // inter-org variant per publish digest
  uint64_t internal_outbound_blocked = 0;

  struct SentRecord {
    uint32_t src_node, dst_node, src_org, dst_org;
    CtiRecord record;
  };
  std::vector<SentRecord> sent_log;

  explicit World(const ScenarioConfig& c) : cfg(c), master(c.seed) {}

  uint32_t org_of(uint32_t node_id) const { return node_id / cfg.its_per_org; }
};

// ---------------------------------------------------------------------------
// Per-node state machine.

class FederationNode : public SimNode {
 public:
  FederationNode(ScenarioRunner::World* world, NodeState state)
      : world_(world),
        state_(std::move(state)),
        rng_(world->master.derive("node", state_.node_id)) {}

  NodeState& state() { return state_; }
  const NodeState& state() const { return state_; }

  void on_message(Simulator& sim, uint32_t src, const Bytes& payload, uint64_t msg_id) override {
    (void)src;
    if (payload.empty()) {
      ++state_.quarantined;
      return;
    }
    // Duplicate deliveries of one message are ingested once.
    if (!seen_msgs_.insert(msg_id).second) return;
    switch (payload[0]) {
      case kMsgCtiShare:
        handle_cti_share(sim, payload);
        break;
      case kMsgRetraction:
        handle_retraction(payload);
        break;
      default:
        ++state_.quarantined;
        break;
    }
  }

  void on_timer(Simulator& sim, const Bytes& payload) override {
    if (payload.empty()) return;
    switch (payload[0]) {
      case kTimerMitigate: {
        std::string vuln(payload.begin() + 1, payload.end());
        if (!state_.mitigated.contains(vuln)) state_.mitigated[vuln] = sim.now();
        break;
      }
      case kTimerSync: {
        sync_with_ledger();
        uint64_t next = sim.now() + world_->cfg.sync_interval;
        if (next <= world_->cfg.duration) sim.set_timer(state_.node_id, next, {kTimerSync});
        break;
      }
      case kTimerBackgroundShare: {
        if (!state_.local_records.empty()) {
          size_t i = rng_.uniform_int(0, state_.local_records.size() - 1);
          CtiRecord rec = state_.local_records[i];
          rec.observed_at = static_cast<int64_t>(sim.now());
          broadcast_record(sim, rec, /*fabricated=*/false);
        }
        uint64_t next = sim.now() + world_->cfg.background_share_interval;
        if (next <= world_->cfg.duration)
          sim.set_timer(state_.node_id, next, {kTimerBackgroundShare});
        break;
      }
      case kTimerInjected: {
        uint32_t idx = get_u32(ByteSpan(payload.data(), payload.size()), 1);
        dispatch_injected(sim, world_->cfg.events.at(idx));
        break;
      }
      default:
        break;
    }
  }

  // Detection entry point: builds the vulnerability record, schedules local
  // mitigation, and (when sharing is on) publishes and broadcasts it. A
  // malicious provider fabricates the advertised id with probability
  // false_intel_rate; it still mitigates the real one locally.
  void on_detect(Simulator& sim, const std::string& vuln, Sensitivity sensitivity) {
    if (!state_.has_role(Role::Provider)) throw RoleViolation("on_detect: node lacks Provider");
    uint64_t tick = sim.now();

    CtiRecord rec;
    rng_.fill_bytes(rec.record_id.data(), rec.record_id.size());
    rec.kind = CtiKind::VulnerabilityId;
    rec.value = vuln;
    rec.sensitivity = sensitivity;
    rec.source = SourceId::from_token(world_->node_token[state_.node_id]);
    rec.confidence = 0.9;
    rec.observed_at = static_cast<int64_t>(tick);

    bool fabricated = false;
    if (state_.behavior.malicious() && rng_.bernoulli(state_.behavior.false_intel_rate)) {
      rec.value = fabricate_vuln_id();
      fabricated = true;
    }

    schedule_mitigation(sim, vuln, tick + world_->cfg.local_mitigation_delay);
    if (!world_->cfg.sharing_enabled) return;
    broadcast_record(sim, rec, fabricated);
  }

  // Ingestion of a delivered record: validate or quarantine, raise a
  // subscription alert, schedule remote-path mitigation for vulnerability
  // ids, and track the active digest unless the ledger already revoked it.
  void on_ingest(Simulator& sim, const CtiRecord& rec, const Digest& ledger_digest) {
    uint64_t tick = sim.now();
    if (!validate(rec).empty() || rec.sensitivity == Sensitivity::Internal) {
      ++state_.quarantined;
      return;
    }
    if (state_.subscriptions.contains(rec.kind)) {
      state_.alerts.push_back(
          {tick, rec.kind, static_cast<int64_t>(tick) - rec.observed_at});
    }
    if (rec.kind == CtiKind::VulnerabilityId && !state_.mitigated.contains(rec.value)) {
      schedule_mitigation(sim, rec.value, tick + world_->cfg.remote_mitigation_delay);
    }
    if (!world_->ledger.is_revoked(ledger_digest)) state_.active_intel.insert(ledger_digest);
  }

  // Revocation flow: tombstone on the ledger, retraction notice to everyone,
  // immediate removal from the local active view.
  void on_poison_detected(Simulator& sim, const Digest& payload_digest) {
    world_->ledger.revoke(payload_digest, world_->node_token[state_.node_id], sim.now());
    state_.active_intel.erase(payload_digest);
    Bytes payload = encode_retraction(payload_digest);
    for (uint32_t n = 0; n < world_->cfg.node_count(); ++n) {
      if (n == state_.node_id) continue;
      sim.send(state_.node_id, n, payload);
    }
  }

 private:
  void handle_cti_share(Simulator& sim, const Bytes& payload) {
    ByteSpan b(payload.data(), payload.size());
    if (payload.size() < 1 + 4 + 4 + 32 + 4) {
      ++state_.quarantined;
      return;
    }
    size_t off = 1 + 4 + 4;  // type, origin node, origin org
    Digest digest{};
    std::copy_n(payload.begin() + off, 32, digest.begin());
    off += 32;
    uint32_t len = get_u32(b, off);
    off += 4;
    if (off + len != payload.size()) {
      ++state_.quarantined;
      return;
    }
    std::string line(payload.begin() + off, payload.end());
    CtiRecord rec;
    try {
      rec = stix_import_line(line);
    } catch (const Error&) {
      ++state_.quarantined;
      return;
    }
    on_ingest(sim, rec, digest);
  }

  void handle_retraction(const Bytes& payload) {
    if (payload.size() != 1 + 32) {
      ++state_.quarantined;
      return;
    }
    Digest digest{};
    std::copy_n(payload.begin() + 1, 32, digest.begin());
    // A malicious node ignores retractions; honest and semi-honest comply.
    if (state_.honest()) state_.active_intel.erase(digest);
  }

  void sync_with_ledger() {
    for (auto it = state_.active_intel.begin(); it != state_.active_intel.end();) {
      if (world_->ledger.is_revoked(*it)) it = state_.active_intel.erase(it);
      else ++it;
    }
  }

  void schedule_mitigation(Simulator& sim, const std::string& vuln, uint64_t fire_tick) {
    if (state_.mitigated.contains(vuln) || mitigation_scheduled_.contains(vuln)) return;
    mitigation_scheduled_.insert(vuln);
    Bytes payload{kTimerMitigate};
    payload.insert(payload.end(), vuln.begin(), vuln.end());
    sim.set_timer(state_.node_id, fire_tick, std::move(payload));
  }

  // The single outbound chokepoint: every record leaving this node passes
  // through here. Internal-sensitivity records are stopped unconditionally.
  void broadcast_record(Simulator& sim, const CtiRecord& rec, bool fabricated) {
    if (rec.sensitivity == Sensitivity::Internal) {
      ++world_->internal_outbound_blocked;
      return;
    }
    uint64_t tick = sim.now();
    const uint32_t org = state_.org_id;
    CtiRecord inter = sanitize(rec, world_->inter_policy[org]);
    CtiRecord intra = sanitize(rec, world_->intra_policy[org]);

    Bytes encoded = canonical_encode(inter);
    Digest digest = sha256(ByteSpan(encoded.data(), encoded.size()));
    if (!world_->published.contains(digest)) {
      world_->ledger.append(EntryKind::Publish, digest, world_->node_token[state_.node_id], tick);
      world_->published.emplace(digest, inter);
      if (fabricated) world_->fabricated.insert(digest);
    }
    state_.active_intel.insert(digest);

    for (uint32_t n = 0; n < world_->cfg.node_count(); ++n) {
      if (n == state_.node_id) continue;
      bool same_org = world_->org_of(n) == org;
      const CtiRecord& variant = same_org ? intra : inter;
      world_->sent_log.push_back({state_.node_id, n, org, world_->org_of(n), variant});
      sim.send(state_.node_id, n,
               encode_cti_share(state_.node_id, org, digest, stix_export_line(variant)));
    }
  }

  void dispatch_injected(Simulator& sim, const InjectedEvent& ev) {
    switch (ev.kind) {
      case InjectedEvent::Kind::ZeroDay:
        on_detect(sim, ev.vuln_id, ev.sensitivity);
        break;
      case InjectedEvent::Kind::Compromise:
        state_.behavior = ev.behavior;
        break;
      case InjectedEvent::Kind::PoisonDetected: {
        // Revoke everything the flagged node published and is still active.
        const auto& target_token = world_->node_token[ev.node];
        std::vector<Digest> targets;
        for (const auto& entry : world_->ledger.entries()) {
          if (entry.kind == EntryKind::Publish && entry.author == target_token &&
              !world_->ledger.is_revoked(entry.payload_digest))
            targets.push_back(entry.payload_digest);
        }
        for (const Digest& d : targets) on_poison_detected(sim, d);
        break;
      }
    }
  }

  std::string fabricate_vuln_id() {
    // Valid CVE shape, fictitious content.
    uint64_t year = 3000 + rng_.uniform_int(0, 999);
    uint64_t num = 10000 + rng_.uniform_int(0, 89999);
    return "CVE-" + std::to_string(year) + "-" + std::to_string(num);
  }

  ScenarioRunner::World* world_;
  NodeState state_;
  Rng rng_;
  std::set<std::string> mitigation_scheduled_;
  std::set<uint64_t> seen_msgs_;
};

// ---------------------------------------------------------------------------
// Runner.

ScenarioRunner::ScenarioRunner(ScenarioConfig config) : config_(std::move(config)) {
  config_.check();
  world_ = std::make_unique<World>(config_);

  NetworkConfig net = config_.network;
  if (net.seed == 0) net.seed = world_->master.derive("net-seed").next_u64();
  sim_ = std::make_unique<Simulator>(net);

  const uint32_t n_nodes = config_.node_count();
  world_->node_token.resize(n_nodes);
  for (uint32_t i = 0; i < n_nodes; ++i)
    world_->node_token[i] = world_->master.derive("node-token", i).key32();

  for (uint32_t org = 0; org < config_.orgs; ++org) {
    auto key_for = [&](const char* audience) {
      return world_->master.derive(std::string("psn-key-") + audience, org).key32();
    };
    SanitizationPolicy intra = default_policy(Audience::IntraOrg, key_for("intra"));
    SanitizationPolicy inter = default_policy(Audience::InterOrg, key_for("inter"));
    SanitizationPolicy pub = default_policy(Audience::Public, key_for("public"));
    for (const auto& [field, action] : config_.intra_overrides) intra.field_rules[field] = action;
    for (const auto& [field, action] : config_.inter_overrides) inter.field_rules[field] = action;
    for (const auto& [field, action] : config_.public_overrides) pub.field_rules[field] = action;
    // Overrides can break a policy (e.g. Public keeping the source); refuse
    // the config up front rather than mid-run.
    for (const auto* policy : {&intra, &inter, &pub}) {
      if (auto issues = validate(*policy); !issues.empty())
        throw ConfigInvalid("policy: " + issues.front());
    }
    world_->intra_policy.push_back(std::move(intra));
    world_->inter_policy.push_back(std::move(inter));
    world_->public_policy.push_back(std::move(pub));
  }

  for (uint32_t i = 0; i < n_nodes; ++i) {
    NodeState st;
    st.node_id = i;
    st.org_id = world_->org_of(i);
    st.roles = static_cast<uint8_t>(Role::Provider) | static_cast<uint8_t>(Role::Processor) |
               static_cast<uint8_t>(Role::Consumer);
    st.subscriptions = config_.subscriptions;

    // Seed a small local corpus mixing kinds and sensitivities; the Internal
    // ones must never show up in any trace.
    Rng seed_rng = world_->master.derive("local-records", i);
    for (uint32_t j = 0; j < config_.local_records_per_node; ++j) {
      CtiRecord rec;
      seed_rng.fill_bytes(rec.record_id.data(), rec.record_id.size());
      switch (j % 4) {
        case 0:
          rec.kind = CtiKind::IpIndicator;
          rec.value = "198.51.100." + std::to_string(seed_rng.uniform_int(1, 254));
          break;
        case 1:
          rec.kind = CtiKind::FileHashIndicator;
          rec.value = to_hex(seed_rng.key32());
          break;
        case 2:
          rec.kind = CtiKind::TechniqueId;
          rec.value = "T1" + std::to_string(seed_rng.uniform_int(100, 599));
          break;
        case 3:
          rec.kind = CtiKind::MalwareSignature;
          rec.value = "sig-" + to_hex(seed_rng.nonce16());
          break;
      }
      rec.sensitivity = static_cast<Sensitivity>(j % 4 == 3 ? 3 : j % 3);  // mix, incl. Internal
      rec.source = SourceId::from_token(world_->node_token[i]);
      rec.confidence = 0.5 + 0.5 * seed_rng.uniform();
      rec.observed_at = 0;
      st.local_records.push_back(std::move(rec));
    }
    nodes_.push_back(std::make_unique<FederationNode>(world_.get(), std::move(st)));
  }
  for (uint32_t i = 0; i < n_nodes; ++i) sim_->register_node(i, nodes_[i].get());

  for (uint32_t i = 0; i < n_nodes; ++i) {
    if (config_.sync_interval <= config_.duration)
      sim_->set_timer(i, config_.sync_interval, {kTimerSync});
    if (config_.background_share_interval > 0 &&
        config_.background_share_interval <= config_.duration)
      sim_->set_timer(i, config_.background_share_interval, {kTimerBackgroundShare});
  }

  for (uint32_t idx = 0; idx < config_.events.size(); ++idx) {
    const InjectedEvent& ev = config_.events[idx];
    uint32_t target = 0;
    switch (ev.kind) {
      case InjectedEvent::Kind::ZeroDay:
        target = ev.org * config_.its_per_org;
        break;
      case InjectedEvent::Kind::Compromise:
        target = ev.node;
        break;
      case InjectedEvent::Kind::PoisonDetected: {
        // The lowest-id node outside the flagged node's org files the
        // revocation; fall back to node 0 in a single-org federation.
        uint32_t flagged_org = world_->org_of(ev.node);
        target = 0;
        for (uint32_t n = 0; n < config_.node_count(); ++n) {
          if (world_->org_of(n) != flagged_org) {
            target = n;
            break;
          }
        }
        break;
      }
    }
    Bytes payload{kTimerInjected};
    put_u32(payload, idx);
    sim_->set_timer(target, ev.tick, std::move(payload));
  }
}

ScenarioRunner::~ScenarioRunner() = default;

const Ledger& ScenarioRunner::ledger() const { return world_->ledger; }
const NodeState& ScenarioRunner::node_state(uint32_t node_id) const {
  return nodes_.at(node_id)->state();
}
NodeState& ScenarioRunner::mutable_node_state(uint32_t node_id) {
  return nodes_.at(node_id)->state();
}
Simulator& ScenarioRunner::sim() { return *sim_; }

ScenarioReport ScenarioRunner::run() {
  if (ran_) throw Error("ScenarioRunner::run: already ran");
  ran_ = true;

  ScenarioReport report;
  report.duration = config_.duration;
  report.seed = config_.seed;
  report.sharing_enabled = config_.sharing_enabled;

  // Message phase, sampled at sync boundaries for the poison time series.
  uint64_t t = 0;
  while (t < config_.duration) {
    t = std::min(t + config_.sync_interval, config_.duration);
    sim_->run_until(t);
    uint64_t poisoned = 0;
    for (const auto& node : nodes_) {
      if (!node->state().honest()) continue;
      for (const Digest& d : node->state().active_intel)
        if (world_->fabricated.contains(d)) ++poisoned;
    }
    report.poisoned_timeseries.emplace_back(t, poisoned);
  }

  // FL phase: one non-DP arm, plus a DP arm with sigma calibrated to the
  // configured privacy budget. Org = FL client; a compromised org scales its
  // update by poison_scale.
  if (config_.fl) {
    const FlScenarioConfig& f = *config_.fl;
    Dataset train = synth_dataset(world_->master.derive("fl-train").next_u64(), f.train_n, f.dim,
                                  f.class_sep, f.label_noise);
    Dataset test = synth_dataset(world_->master.derive("fl-test").next_u64(), f.test_n, f.dim,
                                 f.class_sep, f.label_noise);
    FederatedConfig fed;
    fed.clients = config_.orgs;
    fed.secure_aggregation = f.secure_aggregation;
    fed.local.learning_rate = f.learning_rate;
    fed.local.local_steps = f.local_steps;
    fed.local.batch_size = f.batch_size;
    fed.local.rounds = f.rounds;
    fed.poison_scale.assign(config_.orgs, 1.0);
    for (const auto& node : nodes_) {
      const NodeState& st = node->state();
      if (st.behavior.malicious()) fed.poison_scale[st.org_id] = st.behavior.poison_scale;
    }

    uint64_t run_seed = world_->master.derive("fl-run").next_u64();
    FederatedResult nodp = run_federated(train, test, fed, run_seed);
    for (const RoundMetrics& rm : nodp.per_round)
      report.fl_rounds.push_back({rm.round, "nodp", rm.metrics});
    for (const MaskedTranscriptEntry& e : nodp.transcripts)
      report.fl_transcripts.push_back({"nodp", e});

    if (f.with_dp) {
      size_t shard_n = f.train_n / config_.orgs;
      double q = std::min(1.0, static_cast<double>(f.batch_size) / static_cast<double>(shard_n));
      uint64_t steps = static_cast<uint64_t>(f.rounds) * static_cast<uint64_t>(f.local_steps);
      double sigma = calibrate_sigma(q, steps, f.delta, f.eps_target);
      fed.local.dp = PrivacyParams{f.clip_norm, sigma, q, f.delta};
      FederatedResult dp = run_federated(train, test, fed, run_seed);
      for (const RoundMetrics& rm : dp.per_round)
        report.fl_rounds.push_back({rm.round, "dp", rm.metrics});
      for (const MaskedTranscriptEntry& e : dp.transcripts)
        report.fl_transcripts.push_back({"dp", e});
      report.fl_sigma = sigma;
      report.fl_epsilon_target = f.eps_target;
    }
  }

  // Public-access phase: commitment anchored on the ledger, one exposure
  // proof produced and verified by a non-federated checker.
  if (config_.exposure) {
    const auto& xc = *config_.exposure;
    std::vector<Salt> salts;
    for (size_t i = 0; i < xc.inventory.size(); ++i)
      salts.push_back(world_->master.derive("salt", i).nonce16());
    InventoryCommitment commitment = commit(xc.inventory, salts, world_->node_token[0]);
    world_->ledger.append(EntryKind::CommitmentAnchor, commitment.root, world_->node_token[0],
                          config_.duration);
    Nonce nonce = challenge(world_->master.derive("nonce").next_u64());
    ExposureProof proof = prove_exposure(xc.inventory, salts, xc.prove_item, commitment, nonce);
    Bytes wire = serialize_proof(proof);
    report.exposure_ok = verify_exposure(commitment, xc.prove_item, parse_proof(
        ByteSpan(wire.data(), wire.size())), nonce);
    report.proof_file = wire;
    report.commitment_hex = to_hex(commitment.root);
    report.nonce_hex = to_hex(ByteSpan(nonce.data(), nonce.size()));
    report.proof_item = xc.prove_item;
  }

  // Reports.
  for (const auto& node : nodes_) {
    const NodeState& st = node->state();
    NodeReport nr;
    nr.node_id = st.node_id;
    nr.org_id = st.org_id;
    nr.behavior = st.behavior.name();
    nr.mitigations = st.mitigated;
    nr.alerts = st.alerts;
    nr.quarantined = st.quarantined;
    nr.active_intel_size = st.active_intel.size();
    for (const Digest& d : st.active_intel)
      if (world_->fabricated.contains(d)) ++nr.poisoned_active;
    report.nodes.push_back(std::move(nr));
  }

  report.ledger_entries = world_->ledger.size();
  for (const auto& e : world_->ledger.entries()) {
    if (e.kind == EntryKind::Publish) ++report.publishes;
    if (e.kind == EntryKind::Revoke) ++report.revokes;
  }
  report.ledger_ok = world_->ledger.verify_chain();

  report.segmentation_ok = true;
  for (const auto& sent : world_->sent_log) {
    if (sent.record.sensitivity == Sensitivity::Internal) report.segmentation_ok = false;
    if (sent.src_org != sent.dst_org && sent.record.source && !sent.record.source->is_token)
      report.segmentation_ok = false;
  }
  report.internal_outbound_blocked = world_->internal_outbound_blocked;

  for (const SimEvent& ev : sim_->trace()) {
    switch (ev.kind) {
      case SimEventKind::Send: ++report.sends; break;
      case SimEventKind::Deliver: ++report.delivers; break;
      case SimEventKind::Drop: ++report.drops; break;
      case SimEventKind::Duplicate: ++report.duplicates; break;
      case SimEventKind::TimerFire: ++report.timer_fires; break;
    }
  }
  report.trace_csv = sim_->trace_csv();

  // Active published records, in ledger order, as STIX-lite.
  {
    std::set<Digest> active = world_->ledger.active_view();
    std::vector<CtiRecord> records;
    std::set<Digest> emitted;
    for (const auto& e : world_->ledger.entries()) {
      if (e.kind != EntryKind::Publish || !active.contains(e.payload_digest)) continue;
      if (!emitted.insert(e.payload_digest).second) continue;
      auto it = world_->published.find(e.payload_digest);
      if (it != world_->published.end()) records.push_back(it->second);
    }
    report.stix_active = stix_export(records);
  }

  std::ostringstream ledger_stream;
  world_->ledger.write(ledger_stream);
  std::string lf = ledger_stream.str();
  report.ledger_file.assign(lf.begin(), lf.end());

  return report;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  return ScenarioRunner(config).run();
}

// ---------------------------------------------------------------------------
// Report serialization.

std::optional<uint64_t> ScenarioReport::org_mitigation_tick(uint32_t org,
                                                            const std::string& vuln) const {
  std::optional<uint64_t> best;
  for (const NodeReport& nr : nodes) {
    if (nr.org_id != org) continue;
    auto it = nr.mitigations.find(vuln);
    if (it == nr.mitigations.end()) continue;
    if (!best || it->second < *best) best = it->second;
  }
  return best;
}

std::string ScenarioReport::to_json() const {
  ordered_json j;
  j["duration"] = duration;
  j["seed"] = seed;
  j["sharing_enabled"] = sharing_enabled;

  j["nodes"] = ordered_json::array();
  for (const NodeReport& nr : nodes) {
    ordered_json n;
    n["node"] = nr.node_id;
    n["org"] = nr.org_id;
    n["behavior"] = nr.behavior;
    n["mitigations"] = nr.mitigations;
    ordered_json alerts = ordered_json::array();
    for (const AlertRecord& a : nr.alerts)
      alerts.push_back({{"tick", a.tick}, {"kind", to_string(a.kind)}, {"latency", a.latency}});
    n["alerts"] = std::move(alerts);
    n["quarantined"] = nr.quarantined;
    n["active_intel"] = nr.active_intel_size;
    n["poisoned_active"] = nr.poisoned_active;
    j["nodes"].push_back(std::move(n));
  }

  j["ledger"] = {{"entries", ledger_entries},
                 {"publishes", publishes},
                 {"revokes", revokes},
                 {"verified", ledger_ok}};
  j["segmentation_ok"] = segmentation_ok;
  j["internal_outbound_blocked"] = internal_outbound_blocked;

  ordered_json ts = ordered_json::array();
  for (const auto& [tick, count] : poisoned_timeseries) ts.push_back({tick, count});
  j["poisoned_timeseries"] = std::move(ts);

  if (!fl_rounds.empty()) {
    ordered_json fl = ordered_json::array();
    for (const CompareRow& row : fl_rounds) {
      fl.push_back({{"round", row.round},
                    {"setting", row.setting},
                    {"accuracy", row.metrics.accuracy},
                    {"f1", row.metrics.f1},
                    {"recall", row.metrics.recall}});
    }
    ordered_json transcripts = ordered_json::array();
    for (const FlTranscript& t : fl_transcripts) {
      transcripts.push_back({{"setting", t.setting},
                             {"round", t.entry.round},
                             {"client", t.entry.client_id},
                             {"coords", t.entry.coords}});
    }
    j["fl"] = {{"rounds", std::move(fl)},
               {"sigma", fl_sigma},
               {"epsilon_target", fl_epsilon_target},
               {"masked_transcripts", std::move(transcripts)}};
  }

  if (exposure_ok) {
    j["exposure"] = {{"verified", *exposure_ok},
                     {"item", proof_item},
                     {"commitment", commitment_hex},
                     {"nonce", nonce_hex}};
  }

  j["trace"] = {{"sends", sends},
                {"delivers", delivers},
                {"drops", drops},
                {"duplicates", duplicates},
                {"timer_fires", timer_fires}};
  return j.dump(2) + "\n";
}

std::string ScenarioReport::timeseries_csv() const {
  std::string out = "tick,poisoned_active\n";
  for (const auto& [tick, count] : poisoned_timeseries)
    out += std::to_string(tick) + "," + std::to_string(count) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Scenario config parsing: [section] tables of key = value lines, '#'
// comments, repeated keys allowed where noted.

namespace {

struct ConfigLine {
  std::string section;
  std::string key;
  std::string value;
  size_t line_no;
};

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

uint64_t parse_u64(const std::string& v, const std::string& path) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigInvalid(path + ": expected unsigned integer, got '" + v + "'");
  return out;
}

double parse_f64(const std::string& v, const std::string& path) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigInvalid(path + ": expected number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v, const std::string& path) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigInvalid(path + ": expected boolean, got '" + v + "'");
}

FieldAction parse_action(const std::string& v, const std::string& path) {
  if (v == "keep") return FieldAction::Keep;
  if (v == "redact") return FieldAction::Redact;
  if (v == "pseudonymize") return FieldAction::Pseudonymize;
  if (v == "generalize_ip24") return FieldAction::GeneralizeIpTo24;
  throw ConfigInvalid(path + ": unknown action '" + v + "'");
}

InjectedEvent parse_event(const std::string& key, const std::string& value,
                          const std::string& path) {
  InjectedEvent ev;
  if (key == "zero_day") ev.kind = InjectedEvent::Kind::ZeroDay;
  else if (key == "compromise") ev.kind = InjectedEvent::Kind::Compromise;
  else if (key == "poison_detected") ev.kind = InjectedEvent::Kind::PoisonDetected;
  else throw ConfigInvalid(path + ": unknown event '" + key + "'");

  std::vector<std::string> toks = split_ws(value);
  if (toks.empty()) throw ConfigInvalid(path + ": missing tick");
  ev.tick = parse_u64(toks[0], path + ".tick");
  for (size_t i = 1; i < toks.size(); ++i) {
    size_t eq = toks[i].find('=');
    if (eq == std::string::npos) throw ConfigInvalid(path + ": expected key=value, got '" + toks[i] + "'");
    std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
    if (k == "org") ev.org = static_cast<uint32_t>(parse_u64(v, path + ".org"));
    else if (k == "node") ev.node = static_cast<uint32_t>(parse_u64(v, path + ".node"));
    else if (k == "vuln") ev.vuln_id = v;
    else if (k == "sensitivity") {
      auto s = sensitivity_from_string(v);
      if (!s) throw ConfigInvalid(path + ".sensitivity: unknown '" + v + "'");
      ev.sensitivity = *s;
    } else if (k == "poison_scale") {
      ev.behavior.kind = BehaviorSpec::Kind::Malicious;
      ev.behavior.poison_scale = parse_f64(v, path + ".poison_scale");
    } else if (k == "false_intel_rate") {
      ev.behavior.kind = BehaviorSpec::Kind::Malicious;
      ev.behavior.false_intel_rate = parse_f64(v, path + ".false_intel_rate");
    } else if (k == "behavior") {
      if (v == "honest") ev.behavior.kind = BehaviorSpec::Kind::Honest;
      else if (v == "semi_honest") ev.behavior.kind = BehaviorSpec::Kind::SemiHonest;
      else if (v == "malicious") ev.behavior.kind = BehaviorSpec::Kind::Malicious;
      else throw ConfigInvalid(path + ".behavior: unknown '" + v + "'");
    } else {
      throw ConfigInvalid(path + ": unknown attribute '" + k + "'");
    }
  }
  if (ev.kind == InjectedEvent::Kind::ZeroDay && ev.vuln_id.empty())
    throw ConfigInvalid(path + ": zero_day requires vuln=<id>");
  return ev;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& text) {
  std::vector<ConfigLine> lines;
  {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    size_t no = 0;
    while (std::getline(in, raw)) {
      ++no;
      std::string line = raw;
      if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigInvalid("line " + std::to_string(no) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigInvalid("line " + std::to_string(no) + ": expected key = value");
      lines.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), no});
    }
  }

  ScenarioConfig cfg;
  bool fl_enabled = false;
  FlScenarioConfig fl;
  ExposureScenarioConfig exposure;
  bool have_exposure = false;

  for (const ConfigLine& l : lines) {
    std::string path = l.section.empty() ? l.key : l.section + "." + l.key;
    if (l.section == "scenario") {
      if (l.key == "orgs") cfg.orgs = static_cast<uint32_t>(parse_u64(l.value, path));
      else if (l.key == "its_per_org") cfg.its_per_org = static_cast<uint32_t>(parse_u64(l.value, path));
      else if (l.key == "duration") cfg.duration = parse_u64(l.value, path);
      else if (l.key == "seed") cfg.seed = parse_u64(l.value, path);
      else if (l.key == "sharing") cfg.sharing_enabled = parse_bool(l.value, path);
      else if (l.key == "sync_interval") cfg.sync_interval = parse_u64(l.value, path);
      else if (l.key == "local_mitigation_delay") cfg.local_mitigation_delay = parse_u64(l.value, path);
      else if (l.key == "remote_mitigation_delay") cfg.remote_mitigation_delay = parse_u64(l.value, path);
      else if (l.key == "background_share_interval") cfg.background_share_interval = parse_u64(l.value, path);
      else if (l.key == "local_records_per_node") cfg.local_records_per_node = static_cast<uint32_t>(parse_u64(l.value, path));
      else if (l.key == "subscriptions") {
        cfg.subscriptions.clear();
        for (const std::string& name : split_ws(l.value)) {
          auto k = kind_from_string(name);
          if (!k) throw ConfigInvalid(path + ": unknown kind '" + name + "'");
          cfg.subscriptions.insert(*k);
        }
      } else throw ConfigInvalid(path + ": unknown key");
    } else if (l.section == "network") {
      if (l.key == "drop_prob") cfg.network.drop_prob = parse_f64(l.value, path);
      else if (l.key == "dup_prob") cfg.network.dup_prob = parse_f64(l.value, path);
      else if (l.key == "delay_min") cfg.network.delay_min = parse_u64(l.value, path);
      else if (l.key == "delay_max") cfg.network.delay_max = parse_u64(l.value, path);
      else if (l.key == "gst") cfg.network.gst = parse_u64(l.value, path);
      else if (l.key == "delta_bound") cfg.network.delta_bound = parse_u64(l.value, path);
      else if (l.key == "seed") cfg.network.seed = parse_u64(l.value, path);
      else throw ConfigInvalid(path + ": unknown key");
    } else if (l.section == "policy.intra_org" || l.section == "policy.inter_org" ||
               l.section == "policy.public") {
      FieldAction action = parse_action(l.value, path);
      auto& overrides = l.section == "policy.intra_org" ? cfg.intra_overrides
                        : l.section == "policy.inter_org" ? cfg.inter_overrides
                                                          : cfg.public_overrides;
      const auto& fields = record_field_names();
      if (std::find(fields.begin(), fields.end(), l.key) == fields.end())
        throw ConfigInvalid(path + ": unknown record field");
      overrides[l.key] = action;
    } else if (l.section == "events") {
      cfg.events.push_back(parse_event(l.key, l.value, "events." + l.key + "@line" +
                                                            std::to_string(l.line_no)));
    } else if (l.section == "fl") {
      if (l.key == "enabled") fl_enabled = parse_bool(l.value, path);
      else if (l.key == "with_dp") fl.with_dp = parse_bool(l.value, path);
      else if (l.key == "rounds") fl.rounds = static_cast<int>(parse_u64(l.value, path));
      else if (l.key == "local_steps") fl.local_steps = static_cast<int>(parse_u64(l.value, path));
      else if (l.key == "batch_size") fl.batch_size = static_cast<int>(parse_u64(l.value, path));
      else if (l.key == "learning_rate") fl.learning_rate = parse_f64(l.value, path);
      else if (l.key == "clip_norm") fl.clip_norm = parse_f64(l.value, path);
      else if (l.key == "train_n") fl.train_n = parse_u64(l.value, path);
      else if (l.key == "test_n") fl.test_n = parse_u64(l.value, path);
      else if (l.key == "dim") fl.dim = parse_u64(l.value, path);
      else if (l.key == "class_sep") fl.class_sep = parse_f64(l.value, path);
      else if (l.key == "label_noise") fl.label_noise = parse_f64(l.value, path);
      else if (l.key == "eps_target") fl.eps_target = parse_f64(l.value, path);
      else if (l.key == "delta") fl.delta = parse_f64(l.value, path);
      else if (l.key == "secure_aggregation") fl.secure_aggregation = parse_bool(l.value, path);
      else throw ConfigInvalid(path + ": unknown key");
    } else if (l.section == "exposure") {
      have_exposure = true;
      if (l.key == "inventory") exposure.inventory = split_ws(l.value);
      else if (l.key == "prove") exposure.prove_item = l.value;
      else throw ConfigInvalid(path + ": unknown key");
    } else {
      throw ConfigInvalid("line " + std::to_string(l.line_no) + ": unknown section [" +
                          l.section + "]");
    }
  }

  if (fl_enabled) cfg.fl = fl;
  if (have_exposure) cfg.exposure = exposure;
  cfg.check();
  return cfg;
}

}  // namespace legion
