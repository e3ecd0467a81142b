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

// Single CLI entry point. Exit codes: 0 success, 1 verification or
// assertion failure (with a diagnostic on stderr), 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "legion/errors.hpp"
#include "legion/exposure.hpp"
#include "legion/federation.hpp"
#include "legion/fl.hpp"
#include "legion/ledger.hpp"
#include "legion/privacy.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw legion::ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw legion::Error("cannot write file: " + path.string());
}

int run_accountant_eps(double sigma, double q, uint64_t steps, double delta) {
  legion::RdpCurve curve = legion::compose(legion::RdpCurve{}, q, sigma, steps);
  legion::EpsilonResult r = legion::to_epsilon(curve, delta);
  std::printf("epsilon=%.6f order=%d\n", r.epsilon, r.order);
  return kOk;
}

int run_accountant_calibrate(double eps, double q, uint64_t steps, double delta) {
  double sigma = legion::calibrate_sigma(q, steps, delta, eps);
  std::printf("sigma=%.6f\n", sigma);
  return kOk;
}

int run_ledger_verify(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "ledger verify: cannot open %s\n", path.c_str());
    return kFailure;
  }
  legion::Ledger ledger;
  try {
    ledger = legion::Ledger::read(in);
  } catch (const legion::ParseError& e) {
    std::fprintf(stderr, "ledger verify: %s\n", e.what());
    return kFailure;
  }
  if (!ledger.verify_chain()) {
    std::fprintf(stderr, "ledger verify: chain verification failed\n");
    return kFailure;
  }
  std::printf("chain ok, %zu entries\n", ledger.size());
  return kOk;
}

int run_proof_verify(const std::string& commitment_hex, const std::string& proof_path,
                     const std::string& nonce_hex) {
  legion::InventoryCommitment commitment;
  legion::Nonce nonce{};
  try {
    commitment.root = legion::array_from_hex<32>(commitment_hex);
    nonce = legion::array_from_hex<16>(nonce_hex);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "proof verify: %s\n", e.what());
    return kFailure;
  }
  std::string raw;
  legion::ExposureProof proof;
  try {
    raw = read_file(proof_path);
    proof = legion::parse_proof(
        legion::ByteSpan(reinterpret_cast<const uint8_t*>(raw.data()), raw.size()));
  } catch (const legion::Error& e) {
    std::fprintf(stderr, "proof verify: %s\n", e.what());
    return kFailure;
  }
  commitment.leaf_count = 0;  // not part of the check
  if (!legion::verify_exposure(commitment, proof.item, proof, nonce)) {
    std::fprintf(stderr, "proof verify: proof rejected\n");
    return kFailure;
  }
  std::printf("proof ok: %s\n", proof.item.c_str());
  return kOk;
}

int run_fl_compare(const legion::CompareConfig& cfg, uint64_t seed) {
  legion::CompareResult result = legion::compare_dp_vs_nodp(cfg, seed);
  std::fputs(legion::compare_csv(result).c_str(), stdout);
  std::fprintf(stderr, "sigma=%.6f q=%.6f steps=%llu\n", result.calibrated_sigma, result.q,
               static_cast<unsigned long long>(result.accounted_steps));
  return kOk;
}

int run_scenario(const std::string& config_path, uint64_t seed, bool seed_set,
                 const std::string& out_dir) {
  legion::ScenarioConfig cfg = legion::parse_scenario_config(read_file(config_path));
  if (seed_set) cfg.seed = seed;
  legion::ScenarioReport report = legion::run_scenario(cfg);

  if (!out_dir.empty()) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "report.json", report.to_json());
    write_file(dir / "timeseries.csv", report.timeseries_csv());
    write_file(dir / "trace.csv", report.trace_csv);
    write_file(dir / "active_records.stix", report.stix_active);
    write_file(dir / "ledger.bin",
               std::string_view(reinterpret_cast<const char*>(report.ledger_file.data()),
                                report.ledger_file.size()));
    if (!report.proof_file.empty()) {
      write_file(dir / "exposure_proof.bin",
                 std::string_view(reinterpret_cast<const char*>(report.proof_file.data()),
                                  report.proof_file.size()));
    }
  } else {
    std::fputs(report.to_json().c_str(), stdout);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"legion: federated intrusion-tolerant CTI sharing laboratory"};
  app.require_subcommand(1);

  // scenario run
  auto* scenario = app.add_subcommand("scenario", "Scenario simulation");
  scenario->require_subcommand(1);
  auto* scenario_run = scenario->add_subcommand("run", "Run a scenario config file");
  std::string scenario_file, scenario_out;
  uint64_t scenario_seed = 0;
  scenario_run->add_option("file", scenario_file, "Scenario config file")->required();
  auto* seed_opt = scenario_run->add_option("--seed", scenario_seed, "Override the config seed");
  scenario_run->add_option("--out", scenario_out, "Output directory for report artifacts");

  // fl compare
  auto* fl = app.add_subcommand("fl", "Federated learning experiments");
  fl->require_subcommand(1);
  auto* fl_compare = fl->add_subcommand("compare", "Paired non-DP vs DP federated run (CSV)");
  legion::CompareConfig fl_cfg;
  uint64_t fl_seed = 0;
  uint64_t fl_clients = 3, fl_rounds = 3, fl_train_n = 20000, fl_test_n = 5000, fl_dim = 16;
  uint64_t fl_steps = 30, fl_batch = 2;
  fl_compare->add_option("--clients", fl_clients, "Client count");
  fl_compare->add_option("--rounds", fl_rounds, "Federated rounds");
  fl_compare->add_option("--sep", fl_cfg.class_sep, "Synthetic class separation");
  fl_compare->add_option("--eps", fl_cfg.eps_target, "Privacy budget epsilon target");
  fl_compare->add_option("--delta", fl_cfg.delta, "Privacy delta");
  fl_compare->add_option("--seed", fl_seed, "Master seed")->required();
  fl_compare->add_option("--train-n", fl_train_n, "Training examples");
  fl_compare->add_option("--test-n", fl_test_n, "Test examples");
  fl_compare->add_option("--dim", fl_dim, "Feature dimension");
  fl_compare->add_option("--label-noise", fl_cfg.label_noise, "Label flip probability");
  fl_compare->add_option("--local-steps", fl_steps, "Local SGD steps per round");
  fl_compare->add_option("--batch", fl_batch, "Batch size (plain) / expected batch (DP)");
  fl_compare->add_option("--lr", fl_cfg.learning_rate, "Learning rate");
  fl_compare->add_option("--clip", fl_cfg.clip_norm, "DP clipping norm");
  fl_compare->add_flag("--secure-agg", fl_cfg.secure_aggregation, "Aggregate via pairwise masking");

  // accountant
  auto* accountant = app.add_subcommand("accountant", "Renyi-DP accountant");
  accountant->require_subcommand(1);
  auto* acc_eps = accountant->add_subcommand("eps", "Composed (epsilon, order) for given noise");
  double acc_sigma = 1.0, acc_q = 0.01, acc_delta = 1e-5, acc_eps_target = 1.64;
  uint64_t acc_steps = 1;
  acc_eps->add_option("--sigma", acc_sigma, "Noise multiplier")->required();
  acc_eps->add_option("--q", acc_q, "Poisson sample rate")->required();
  acc_eps->add_option("--steps", acc_steps, "Composition steps")->required();
  acc_eps->add_option("--delta", acc_delta, "Delta")->required();
  auto* acc_cal = accountant->add_subcommand("calibrate", "Smallest sigma meeting epsilon");
  acc_cal->add_option("--eps", acc_eps_target, "Epsilon target")->required();
  acc_cal->add_option("--q", acc_q, "Poisson sample rate")->required();
  acc_cal->add_option("--steps", acc_steps, "Composition steps")->required();
  acc_cal->add_option("--delta", acc_delta, "Delta")->required();

  // ledger verify
  auto* ledger_cmd = app.add_subcommand("ledger", "Ledger tools");
  ledger_cmd->require_subcommand(1);
  auto* ledger_verify = ledger_cmd->add_subcommand("verify", "Verify a ledger file's hash chain");
  std::string ledger_file;
  ledger_verify->add_option("file", ledger_file, "Ledger file")->required();

  // proof verify
  auto* proof = app.add_subcommand("proof", "Exposure proof tools");
  proof->require_subcommand(1);
  auto* proof_verify = proof->add_subcommand("verify", "Verify a serialized exposure proof");
  std::string proof_commitment, proof_file, proof_nonce;
  proof_verify->add_option("commitment", proof_commitment, "Commitment root (hex)")->required();
  proof_verify->add_option("proof", proof_file, "Proof file")->required();
  proof_verify->add_option("nonce", proof_nonce, "Challenge nonce (hex)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (scenario_run->parsed())
      return run_scenario(scenario_file, scenario_seed, !seed_opt->empty(), scenario_out);
    if (fl_compare->parsed()) {
      fl_cfg.clients = fl_clients;
      fl_cfg.rounds = static_cast<int>(fl_rounds);
      fl_cfg.train_n = fl_train_n;
      fl_cfg.test_n = fl_test_n;
      fl_cfg.dim = fl_dim;
      fl_cfg.local_steps = static_cast<int>(fl_steps);
      fl_cfg.batch_size = static_cast<int>(fl_batch);
      return run_fl_compare(fl_cfg, fl_seed);
    }
    if (acc_eps->parsed()) return run_accountant_eps(acc_sigma, acc_q, acc_steps, acc_delta);
    if (acc_cal->parsed())
      return run_accountant_calibrate(acc_eps_target, acc_q, acc_steps, acc_delta);
    if (ledger_verify->parsed()) return run_ledger_verify(ledger_file);
    if (proof_verify->parsed())
      return run_proof_verify(proof_commitment, proof_file, proof_nonce);
  } catch (const legion::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  std::cerr << "no subcommand\n";
  return kUsage;
}
