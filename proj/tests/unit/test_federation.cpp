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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "legion/errors.hpp"
#include "legion/federation.hpp"
#include "legion/sha256.hpp"

using namespace legion;

namespace {

ScenarioConfig base_config(uint64_t seed) {
  ScenarioConfig cfg;
  cfg.orgs = 2;
  cfg.its_per_org = 2;
  cfg.duration = 1400;
  cfg.seed = seed;
  cfg.sharing_enabled = true;
  cfg.sync_interval = 50;
  cfg.local_mitigation_delay = 300;
  cfg.remote_mitigation_delay = 40;
  cfg.network.drop_prob = 0.05;
  cfg.network.dup_prob = 0.02;
  cfg.network.delay_min = 1;
  cfg.network.delay_max = 20;
  cfg.network.gst = 500;
  cfg.network.delta_bound = 5;
  return cfg;
}

InjectedEvent zero_day(uint64_t tick, uint32_t org, const std::string& cve) {
  InjectedEvent ev;
  ev.kind = InjectedEvent::Kind::ZeroDay;
  ev.tick = tick;
  ev.org = org;
  ev.vuln_id = cve;
  return ev;
}

InjectedEvent compromise(uint64_t tick, uint32_t node, double poison_scale,
                         double false_intel_rate) {
  InjectedEvent ev;
  ev.kind = InjectedEvent::Kind::Compromise;
  ev.tick = tick;
  ev.node = node;
  ev.behavior.kind = BehaviorSpec::Kind::Malicious;
  ev.behavior.poison_scale = poison_scale;
  ev.behavior.false_intel_rate = false_intel_rate;
  return ev;
}

InjectedEvent poison_detected(uint64_t tick, uint32_t node) {
  InjectedEvent ev;
  ev.kind = InjectedEvent::Kind::PoisonDetected;
  ev.tick = tick;
  ev.node = node;
  return ev;
}

constexpr const char* kCve = "CVE-2024-0132";

}  // namespace

TEST_CASE("config validation paths") {
  ScenarioConfig cfg = base_config(1);
  cfg.orgs = 0;
  CHECK_THROWS_WITH_AS(cfg.check(), "scenario.orgs: must be >= 1", ConfigInvalid);

  cfg = base_config(1);
  cfg.events.push_back(zero_day(5000, 0, kCve));
  CHECK_THROWS_AS(cfg.check(), ConfigInvalid);

  cfg = base_config(1);
  cfg.events.push_back(zero_day(100, 9, kCve));
  CHECK_THROWS_AS(cfg.check(), ConfigInvalid);

  cfg = base_config(1);
  cfg.events.push_back(zero_day(100, 0, "not-a-cve"));
  CHECK_THROWS_AS(cfg.check(), ConfigInvalid);

  // An override that breaks a policy is refused at construction.
  cfg = base_config(1);
  cfg.public_overrides["source"] = FieldAction::Keep;
  CHECK_THROWS_AS(ScenarioRunner{cfg}, ConfigInvalid);
}

TEST_CASE("duration zero yields an empty report") {
  ScenarioConfig cfg = base_config(2);
  cfg.duration = 0;
  cfg.events.clear();
  ScenarioReport report = run_scenario(cfg);
  CHECK(report.sends == 0);
  CHECK(report.delivers == 0);
  CHECK(report.ledger_entries == 0);
  for (const auto& nr : report.nodes) CHECK(nr.mitigations.empty());
}

TEST_CASE("baseline mode: detection without sharing mitigates locally only") {
  ScenarioConfig cfg = base_config(3);
  cfg.sharing_enabled = false;
  cfg.events.push_back(zero_day(100, 0, kCve));
  ScenarioReport report = run_scenario(cfg);

  CHECK(report.sends == 0);
  CHECK(report.publishes == 0);
  auto org0 = report.org_mitigation_tick(0, kCve);
  REQUIRE(org0.has_value());
  CHECK(*org0 == 100 + cfg.local_mitigation_delay);
  CHECK(!report.org_mitigation_tick(1, kCve).has_value());
}

TEST_CASE("honest detection publishes to the ledger and reaches peers") {
  ScenarioConfig cfg = base_config(4);
  cfg.events.push_back(zero_day(100, 0, kCve));
  ScenarioReport report = run_scenario(cfg);

  CHECK(report.publishes == 1);
  CHECK(report.ledger_ok);
  CHECK(report.sends >= 3);  // three peers
  auto org1 = report.org_mitigation_tick(1, kCve);
  REQUIRE(org1.has_value());
  CHECK(*org1 < 100 + cfg.local_mitigation_delay);  // remote path is faster

  // Subscribed nodes alert exactly once per message despite duplication.
  uint64_t alerts = 0;
  for (const auto& nr : report.nodes) alerts += nr.alerts.size();
  CHECK(alerts >= 2);
  for (const auto& nr : report.nodes) {
    for (const auto& alert : nr.alerts) CHECK(alert.latency >= 1);
  }
}

TEST_CASE("sharing strictly improves time-to-mitigation for non-detecting orgs") {
  for (uint64_t seed : {11ull, 12ull, 13ull, 14ull, 15ull}) {
    ScenarioConfig with = base_config(seed);
    with.events.push_back(zero_day(100, 0, kCve));
    with.events.push_back(zero_day(900, 1, kCve));  // independent late detection
    ScenarioConfig without = with;
    without.sharing_enabled = false;

    ScenarioReport rw = run_scenario(with);
    ScenarioReport ro = run_scenario(without);

    auto shared_tick = rw.org_mitigation_tick(1, kCve);
    auto isolated_tick = ro.org_mitigation_tick(1, kCve);
    REQUIRE(shared_tick.has_value());
    REQUIRE(isolated_tick.has_value());
    CHECK(*shared_tick < *isolated_tick);
    CHECK(*isolated_tick == 900 + without.local_mitigation_delay);
  }
}

TEST_CASE("malicious detection broadcasts a fabricated id but mitigates the real one") {
  ScenarioConfig cfg = base_config(5);
  cfg.events.push_back(compromise(50, 2, 1.0, 1.0));
  cfg.events.push_back(zero_day(100, 1, kCve));  // node 2 is org 1's detector
  ScenarioReport report = run_scenario(cfg);

  // The fabricated digest is tracked as ground-truth poison and lands in
  // honest active views.
  uint64_t poisoned = 0;
  for (const auto& nr : report.nodes)
    if (nr.behavior != "malicious") poisoned += nr.poisoned_active;
  CHECK(poisoned > 0);

  // The malicious node still self-mitigates the true vulnerability.
  auto org1 = report.org_mitigation_tick(1, kCve);
  REQUIRE(org1.has_value());
  CHECK(*org1 == 100 + cfg.local_mitigation_delay);

  // Honest orgs mitigated the fabricated id, not the real one (it never
  // reached them).
  const auto& n0 = report.nodes[0];
  CHECK(!n0.mitigations.contains(kCve));
  REQUIRE(n0.mitigations.size() >= 1);
  CHECK(n0.mitigations.begin()->first.starts_with("CVE-3"));
}

TEST_CASE("revocation clears poisoned intel from every honest node") {
  ScenarioConfig cfg = base_config(6);
  cfg.events.push_back(compromise(50, 2, 1.0, 1.0));
  cfg.events.push_back(zero_day(100, 1, kCve));
  cfg.events.push_back(poison_detected(700, 2));  // after GST at 500
  ScenarioReport report = run_scenario(cfg);

  CHECK(report.revokes >= 1);
  CHECK(report.ledger_ok);
  for (const auto& nr : report.nodes) {
    if (nr.behavior == "malicious") continue;
    CHECK(nr.poisoned_active == 0);
  }
  // The time series shows poison appearing and then clearing.
  uint64_t peak = 0;
  for (const auto& [tick, count] : report.poisoned_timeseries) peak = std::max(peak, count);
  CHECK(peak > 0);
  CHECK(report.poisoned_timeseries.back().second == 0);
}

TEST_CASE("revoking an unknown digest is refused") {
  ScenarioConfig cfg = base_config(7);
  cfg.events.clear();
  ScenarioRunner runner(cfg);
  Digest bogus = sha256("never-published");
  std::array<uint8_t, 32> author{};
  CHECK_THROWS_AS(const_cast<Ledger&>(runner.ledger()).revoke(bogus, author, 1), UnknownTarget);
}

TEST_CASE("segmentation holds with background sharing of mixed-sensitivity records") {
  ScenarioConfig cfg = base_config(8);
  cfg.background_share_interval = 120;
  cfg.local_records_per_node = 8;  // includes Internal records
  cfg.events.push_back(zero_day(100, 0, kCve));
  ScenarioReport report = run_scenario(cfg);

  CHECK(report.segmentation_ok);
  // The chokepoint actually exercised: some Internal record was picked and
  // stopped.
  CHECK(report.internal_outbound_blocked > 0);
  CHECK(report.sends > 0);
}

TEST_CASE("internal-sensitivity detections never leave the node") {
  ScenarioConfig cfg = base_config(9);
  InjectedEvent ev = zero_day(100, 0, kCve);
  ev.sensitivity = Sensitivity::Internal;
  cfg.events.push_back(ev);
  ScenarioReport report = run_scenario(cfg);

  CHECK(report.sends == 0);
  CHECK(report.publishes == 0);
  CHECK(report.internal_outbound_blocked == 1);
  CHECK(report.segmentation_ok);
  auto org0 = report.org_mitigation_tick(0, kCve);
  REQUIRE(org0.has_value());  // local mitigation still happens
}

TEST_CASE("a record whose digest is already revoked is not added to active intel") {
  ScenarioConfig cfg = base_config(20);
  cfg.network.drop_prob = 0.0;
  cfg.network.dup_prob = 0.0;
  cfg.events.push_back(zero_day(10, 0, kCve));
  ScenarioRunner runner(cfg);

  // Process the detection (publish + queued sends), then revoke the digest
  // before any delivery lands.
  runner.sim().run_until(10);
  REQUIRE(runner.ledger().size() == 1);
  Digest digest = runner.ledger().at(0).payload_digest;
  std::array<uint8_t, 32> author{};
  const_cast<Ledger&>(runner.ledger()).revoke(digest, author, 11);

  // Deliveries complete well before the first sync at tick 50: the ingest
  // gate alone must keep the revoked digest out.
  runner.sim().run_until(45);
  for (uint32_t node = 1; node < 4; ++node)
    CHECK(!runner.node_state(node).active_intel.contains(digest));
  // The ingest still alerted and scheduled mitigation; only the active view
  // consultation filtered the digest.
  CHECK(!runner.node_state(1).alerts.empty());
}

TEST_CASE("malformed payloads are quarantined without state changes") {
  ScenarioConfig cfg = base_config(10);
  cfg.events.clear();
  ScenarioRunner runner(cfg);
  runner.sim().send(0, 1, Bytes{0x63, 0x01, 0x02});  // unknown message type
  runner.sim().send(0, 1, Bytes{});                  // empty payload
  Bytes half_share{0x00, 0x01};                      // truncated CtiShare
  runner.sim().send(0, 1, half_share);
  runner.sim().run_until(100);
  CHECK(runner.node_state(1).quarantined == 3);
  CHECK(runner.node_state(1).active_intel.empty());
  CHECK(runner.node_state(1).alerts.empty());
}

TEST_CASE("detection requires the Provider role") {
  ScenarioConfig cfg = base_config(11);
  cfg.events.push_back(zero_day(100, 0, kCve));
  ScenarioRunner runner(cfg);
  runner.mutable_node_state(0).roles = static_cast<uint8_t>(Role::Consumer);
  CHECK_THROWS_AS(runner.run(), RoleViolation);
}

TEST_CASE("scenario runs are bit-reproducible") {
  ScenarioConfig cfg = base_config(12);
  cfg.background_share_interval = 150;
  cfg.events.push_back(compromise(50, 3, 2.0, 0.5));
  cfg.events.push_back(zero_day(100, 0, kCve));
  cfg.events.push_back(zero_day(300, 1, "CVE-2025-1111"));
  cfg.events.push_back(poison_detected(800, 3));
  cfg.exposure = ExposureScenarioConfig{
      {"nvidia-container-toolkit:1.14.2", "openssl:3.0.13", "nginx:1.24.0"},
      "nvidia-container-toolkit:1.14.2"};

  ScenarioReport a = run_scenario(cfg);
  ScenarioReport b = run_scenario(cfg);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.trace_csv == b.trace_csv);
  CHECK(a.timeseries_csv() == b.timeseries_csv());
  CHECK(a.ledger_file == b.ledger_file);
  CHECK(a.stix_active == b.stix_active);
  REQUIRE(a.exposure_ok.has_value());
  CHECK(*a.exposure_ok);
}

TEST_CASE("scenario FL phase emits paired rounds and a calibrated sigma") {
  ScenarioConfig cfg = base_config(13);
  cfg.events.push_back(zero_day(100, 0, kCve));
  FlScenarioConfig fl;
  fl.train_n = 3000;
  fl.test_n = 800;
  cfg.fl = fl;
  ScenarioReport report = run_scenario(cfg);

  REQUIRE(report.fl_rounds.size() == 6);  // 3 rounds x {nodp, dp}
  CHECK(report.fl_sigma > 0.0);
  CHECK(report.fl_epsilon_target == 1.64);
  int nodp = 0, dp = 0;
  for (const auto& row : report.fl_rounds) (row.setting == "nodp" ? nodp : dp)++;
  CHECK(nodp == 3);
  CHECK(dp == 3);

  // Masked-round transcripts: what the aggregator saw. Per (arm, round) the
  // blinded words must sum (mod 2^64) to a plausibly small model update --
  // evidence the pairwise masks canceled -- while each client's own vector
  // stays indistinguishable from noise (some coordinate far outside the
  // update range).
  REQUIRE(report.fl_transcripts.size() == 2 * 3 * cfg.orgs);
  for (const std::string& setting : {std::string("nodp"), std::string("dp")}) {
    for (int round = 1; round <= 3; ++round) {
      std::vector<uint64_t> sum;
      size_t clients = 0;
      for (const auto& t : report.fl_transcripts) {
        if (t.setting != setting || t.entry.round != round) continue;
        ++clients;
        if (sum.empty()) sum.assign(t.entry.coords.size(), 0);
        REQUIRE(t.entry.coords.size() == sum.size());
        for (size_t i = 0; i < sum.size(); ++i) sum[i] += t.entry.coords[i];

        bool blinded = false;
        for (uint64_t w : t.entry.coords) {
          auto magnitude = static_cast<double>(std::abs(static_cast<int64_t>(w)));
          if (magnitude > 1e12) blinded = true;
        }
        CHECK(blinded);
      }
      CHECK(clients == cfg.orgs);
      for (uint64_t w : sum) {
        double value = static_cast<double>(static_cast<int64_t>(w)) / 65536.0;
        CHECK(std::fabs(value) < 1000.0);
      }
    }
  }
}

TEST_CASE("revocation converges after GST even when notices were lost") {
  // Heavy pre-GST loss: retraction notices can vanish, but the periodic
  // ledger sync after GST still clears revoked digests.
  ScenarioConfig cfg = base_config(14);
  cfg.network.drop_prob = 0.6;
  cfg.network.gst = 800;
  cfg.duration = 2000;
  cfg.events.push_back(compromise(20, 2, 1.0, 1.0));
  cfg.events.push_back(zero_day(60, 1, kCve));
  cfg.events.push_back(poison_detected(300, 2));  // well before GST
  ScenarioReport report = run_scenario(cfg);
  for (const auto& nr : report.nodes) {
    if (nr.behavior == "malicious") continue;
    CHECK(nr.poisoned_active == 0);
  }
}

TEST_CASE("config file parsing") {
  const std::string text = R"(
# zero-day case study
[scenario]
orgs = 3
its_per_org = 2
duration = 1500
seed = 42
sharing = true
sync_interval = 50
local_mitigation_delay = 300
remote_mitigation_delay = 40
subscriptions = vulnerability ip-indicator

[network]
drop_prob = 0.05
dup_prob = 0.02
delay_min = 1
delay_max = 20
gst = 500
delta_bound = 5

[policy.public]
value = generalize_ip24

[events]
compromise = 50 node=3 poison_scale=4.0 false_intel_rate=1.0
zero_day = 100 org=0 vuln=CVE-2024-0132
zero_day = 900 org=1 vuln=CVE-2024-0132
poison_detected = 700 node=3

[fl]
enabled = true
train_n = 3000
test_n = 800

[exposure]
inventory = nvidia-container-toolkit:1.14.2 openssl:3.0.13
prove = nvidia-container-toolkit:1.14.2
)";
  ScenarioConfig cfg = parse_scenario_config(text);
  CHECK(cfg.orgs == 3);
  CHECK(cfg.its_per_org == 2);
  CHECK(cfg.duration == 1500);
  CHECK(cfg.subscriptions.contains(CtiKind::IpIndicator));
  CHECK(cfg.network.gst == 500);
  REQUIRE(cfg.events.size() == 4);
  CHECK(cfg.events[0].kind == InjectedEvent::Kind::Compromise);
  CHECK(cfg.events[0].behavior.poison_scale == 4.0);
  CHECK(cfg.events[1].vuln_id == "CVE-2024-0132");
  REQUIRE(cfg.fl.has_value());
  CHECK(cfg.fl->train_n == 3000);
  REQUIRE(cfg.exposure.has_value());
  CHECK(cfg.exposure->inventory.size() == 2);

  CHECK_THROWS_AS(parse_scenario_config("[scenario]\nbogus_key = 1\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario_config("[nosuch]\nx = 1\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario_config("[scenario]\norgs 3\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario_config("[events]\nzero_day = 100 org=0\n"), ConfigInvalid);
}
