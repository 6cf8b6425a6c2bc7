#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "marichain/contracts.hpp"

namespace marichain {

enum class Command { Run, Verify, Inspect, Report };

/// Parsed command line. The binary in tools/ fills this via CLI11; tests
/// drive the commands directly.
struct CliConfig {
  Command command = Command::Run;
  std::string scenario_path;
  std::string ledger_path;
  std::string calls_path;   // defaults to calls.jsonl next to the ledger
  std::string metrics_path; // defaults to metrics.json next to the ledger
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<double> epsilon_override;
  std::optional<double> gamma_override;
  std::optional<long long> imo;
  std::optional<Role> as_role;
  std::string format = "text";  // text | csv
};

// Exit codes, stable across releases:
//   0 success
//   1 runtime failure
//   2 configuration / unreadable or corrupt input file
//   3 ledger verification failed (first bad height printed)
//   4 unknown vessel
//   5 permission denied for the requested role
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerifyFailed = 3;
inline constexpr int kExitUnknownVessel = 4;
inline constexpr int kExitPermission = 5;

int cmd_run(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_inspect(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const CliConfig& config, std::ostream& out, std::ostream& err);

int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err);

}  // namespace marichain
