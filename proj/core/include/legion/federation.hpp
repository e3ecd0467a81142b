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

#ifndef LEGION_FEDERATION_HPP_
#define LEGION_FEDERATION_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "legion/cti.hpp"
#include "legion/fl.hpp"
#include "legion/ledger.hpp"
#include "legion/netsim.hpp"

namespace legion {

// Per-node federation state machines composed over the network simulator:
// detection, sanitization, ledger publication, ingestion with subscription
// alerts, mitigation scheduling, revocation, periodic ledger sync. Each node
// belongs to an org; intra-org peers receive IntraOrg-sanitized records,
// other orgs InterOrg-sanitized ones, and records with Internal sensitivity
// never leave their node (a single outbound chokepoint enforces this).

enum class Role : uint8_t { Provider = 1, Processor = 2, Consumer = 4 };

struct BehaviorSpec {
  enum class Kind : uint8_t { Honest = 0, SemiHonest = 1, Malicious = 2 };
  Kind kind = Kind::Honest;
  double poison_scale = 1.0;      // FL update multiplier when malicious
  double false_intel_rate = 0.0;  // probability a detection is fabricated

  bool malicious() const { return kind == Kind::Malicious; }
  const char* name() const;
};

struct AlertRecord {
  uint64_t tick = 0;
  CtiKind kind = CtiKind::VulnerabilityId;
  int64_t latency = 0;  // tick - record.observed_at
};

struct NodeState {
  uint32_t node_id = 0;
  uint32_t org_id = 0;
  uint8_t roles = 0;  // Role bitmask
  BehaviorSpec behavior;
  std::vector<CtiRecord> local_records;
  std::set<Digest> active_intel;
  std::map<std::string, uint64_t> mitigated;  // vulnerability id -> first mitigation tick
  std::set<CtiKind> subscriptions;
  std::vector<AlertRecord> alerts;
  uint64_t quarantined = 0;

  bool has_role(Role r) const { return roles & static_cast<uint8_t>(r); }
  bool honest() const { return behavior.kind != BehaviorSpec::Kind::Malicious; }
};

struct InjectedEvent {
  enum class Kind : uint8_t { ZeroDay, Compromise, PoisonDetected };
  Kind kind = Kind::ZeroDay;
  uint64_t tick = 0;
  uint32_t org = 0;            // ZeroDay: detecting org (its first node detects)
  uint32_t node = 0;           // Compromise / PoisonDetected target
  std::string vuln_id;         // ZeroDay
  Sensitivity sensitivity = Sensitivity::Community;  // ZeroDay record sensitivity
  BehaviorSpec behavior;       // Compromise
};

struct FlScenarioConfig {
  bool with_dp = true;  // run the DP arm next to the non-DP arm
  int rounds = 3;
  int local_steps = 30;
  int batch_size = 2;
  double learning_rate = 0.5;
  double clip_norm = 10.0;
  size_t train_n = 6000;
  size_t test_n = 1500;
  size_t dim = 16;
  double class_sep = 6.0;
  double label_noise = 0.01;
  double eps_target = 1.64;
  double delta = 1e-5;
  bool secure_aggregation = true;
};

struct ExposureScenarioConfig {
  std::vector<std::string> inventory;
  std::string prove_item;
};

struct ScenarioConfig {
  uint32_t orgs = 2;
  uint32_t its_per_org = 1;
  uint64_t duration = 1500;
  uint64_t seed = 1;
  bool sharing_enabled = true;
  uint64_t sync_interval = 50;
  uint64_t local_mitigation_delay = 300;
  uint64_t remote_mitigation_delay = 40;
  uint64_t background_share_interval = 0;  // 0 disables background sharing
  uint32_t local_records_per_node = 4;
  std::set<CtiKind> subscriptions{CtiKind::VulnerabilityId};
  NetworkConfig network;
  std::map<std::string, FieldAction> intra_overrides;
  std::map<std::string, FieldAction> inter_overrides;
  std::map<std::string, FieldAction> public_overrides;
  std::vector<InjectedEvent> events;
  std::optional<FlScenarioConfig> fl;
  std::optional<ExposureScenarioConfig> exposure;

  uint32_t node_count() const { return orgs * its_per_org; }
  void check() const;  // throws ConfigInvalid with a field path
};

// Key-value config with [section] tables; see docs/scenario format in the
// README. Throws ConfigInvalid naming the offending line or field.
ScenarioConfig parse_scenario_config(const std::string& text);

struct NodeReport {
  uint32_t node_id = 0;
  uint32_t org_id = 0;
  std::string behavior;
  std::map<std::string, uint64_t> mitigations;
  std::vector<AlertRecord> alerts;
  uint64_t quarantined = 0;
  uint64_t active_intel_size = 0;
  uint64_t poisoned_active = 0;
};

struct ScenarioReport {
  uint64_t duration = 0;
  uint64_t seed = 0;
  bool sharing_enabled = true;
  std::vector<NodeReport> nodes;

  uint64_t ledger_entries = 0;
  uint64_t publishes = 0;
  uint64_t revokes = 0;
  bool ledger_ok = false;

  bool segmentation_ok = false;
  uint64_t internal_outbound_blocked = 0;

  // (tick, fabricated digests present in honest active views) samples.
  std::vector<std::pair<uint64_t, uint64_t>> poisoned_timeseries;

  std::vector<CompareRow> fl_rounds;
  double fl_sigma = 0.0;
  double fl_epsilon_target = 0.0;
  // Masked-round transcripts per arm, for audits of what the aggregator saw.
  struct FlTranscript {
    std::string setting;  // "nodp" | "dp"
    MaskedTranscriptEntry entry;
  };
  std::vector<FlTranscript> fl_transcripts;

  std::optional<bool> exposure_ok;

  uint64_t sends = 0, delivers = 0, drops = 0, duplicates = 0, timer_fires = 0;

  // Deterministic serializations for the CLI --out directory.
  std::string to_json() const;
  std::string timeseries_csv() const;
  std::string trace_csv;
  std::string stix_active;   // STIX-lite export of active published records
  Bytes ledger_file;         // ledger on-disk format
  Bytes proof_file;          // exposure proof, when the scenario ran one
  std::string commitment_hex;
  std::string nonce_hex;
  std::string proof_item;

  // First mitigation tick for the vulnerability across an org's nodes;
  // nullopt when the org never mitigated it.
  std::optional<uint64_t> org_mitigation_tick(uint32_t org, const std::string& vuln) const;
};

class FederationNode;

// Builds the federation over a simulator, replays injected events, runs the
// optional FL phase, and emits the report. Fully deterministic in
// config.seed.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(ScenarioConfig config);
  ~ScenarioRunner();

  ScenarioReport run();

  // Test access.
  const Ledger& ledger() const;
  const NodeState& node_state(uint32_t node_id) const;
  NodeState& mutable_node_state(uint32_t node_id);
  Simulator& sim();

 private:
  friend class FederationNode;
  struct World;
  std::unique_ptr<World> world_;
  std::vector<std::unique_ptr<FederationNode>> nodes_;
  std::unique_ptr<Simulator> sim_;
  ScenarioConfig config_;
  bool ran_ = false;
};

ScenarioReport run_scenario(const ScenarioConfig& config);

}  // namespace legion

#endif  // LEGION_FEDERATION_HPP_
