#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "marichain/cli.hpp"

using marichain::CliConfig;
using marichain::Command;

namespace {

std::string default_output_dir() {
  if (const char* env = std::getenv("MARICHAIN_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

void add_common(CLI::App* cmd, CliConfig& config) {
  cmd->add_option("--ledger", config.ledger_path, "Path to ledger.jsonl");
  cmd->add_option("--calls", config.calls_path,
                  "Path to calls.jsonl (default: next to the ledger)");
  cmd->add_option("--metrics", config.metrics_path,
                  "Path to metrics.json (default: next to the ledger)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"marichain: deterministic maritime emissions compliance ledger simulator"};
  app.require_subcommand(1);

  CliConfig config;
  config.output_dir = default_output_dir();

  std::string as_role;
  long long imo = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double gamma = 0.0;

  auto* run = app.add_subcommand("run", "Run a fleet scenario and write the output files");
  run->add_option("--scenario", config.scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", config.output_dir, "Output directory (env MARICHAIN_OUT)");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  auto* eps_opt = run->add_option("--epsilon", epsilon, "Override the consistency epsilon");
  auto* gamma_opt = run->add_option("--gamma", gamma, "Override the consistency gamma");

  auto* verify = app.add_subcommand("verify", "Verify a persisted ledger's integrity");
  verify->add_option("--ledger", config.ledger_path, "Path to ledger.jsonl")->required();

  auto* inspect = app.add_subcommand("inspect", "Show emission history and notifications");
  add_common(inspect, config);
  inspect->add_option("--as", as_role, "Role: admin|vessel_owner|crew|flag_state|port_state")
      ->required();
  auto* imo_opt = inspect->add_option("--imo", imo, "Vessel IMO number");

  auto* report = app.add_subcommand("report", "Aggregate gas costs from a run's call log");
  add_common(report, config);
  report->add_option("--format", config.format, "Output format: text|csv")
      ->check(CLI::IsMember({"text", "csv"}));

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    config.command = Command::Run;
    if (*seed_opt) config.seed_override = seed;
    if (*eps_opt) config.epsilon_override = epsilon;
    if (*gamma_opt) config.gamma_override = gamma;
  } else if (verify->parsed()) {
    config.command = Command::Verify;
  } else if (inspect->parsed()) {
    config.command = Command::Inspect;
    const auto role = marichain::parse_role(as_role);
    if (!role) {
      std::cerr << "unknown role: " << as_role << '\n';
      return marichain::kExitConfig;
    }
    config.as_role = *role;
    if (*imo_opt) config.imo = imo;
  } else if (report->parsed()) {
    config.command = Command::Report;
  }

  return marichain::dispatch(config, std::cout, std::cerr);
}
