#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "marichain/consensus.hpp"
#include "marichain/contracts.hpp"
#include "marichain/geofence.hpp"
#include "marichain/validation.hpp"

namespace marichain {

struct SensorSpec {
  std::string id;
  double calibration_expiry = 1e15;  // effectively never, unless the scenario says otherwise
};

/// From `from_time` onward the vessel reports this position/location.
struct Waypoint {
  double from_time = 0.0;
  GeoPosition position;
  std::string location;
};

/// True sulfur content override active on [from_time, until_time).
struct SulfurPhase {
  double from_time = 0.0;
  double until_time = 0.0;
  double value = 0.0;
};

struct VesselSpec {
  VesselIdentity identity;
  GeoPosition position;
  std::string location;
  double sulfur_percent = 0.1;  // baseline true value
  std::vector<SulfurPhase> sulfur_schedule;
  std::vector<Waypoint> waypoints;
  std::vector<SensorSpec> sensors;
};

enum class FaultKind { Stuck, Drift, OutOfRange, ClockSkew, DishonestValidator };

/// One scheduled fault, active on [from_time, until_time). Sensor faults name
/// (imo, sensor); validator faults name the validator.
struct Fault {
  FaultKind kind = FaultKind::Stuck;
  long long imo = 0;
  std::string sensor_id;
  std::string validator_id;
  double from_time = 0.0;
  double until_time = 0.0;
  double value = 0.0;  // stuck/out_of_range value, drift offset, or skew seconds
};

/// Declarative description of one simulation run. A fixed seed makes the
/// whole run — ledger bytes included — reproducible.
struct FleetScenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  double duration_seconds = 86400.0;
  double pull_interval_seconds = 3600.0;
  int block_capacity = 100;
  double block_time_lo = 2.13;
  double block_time_hi = 2.32;

  ValidationRules rules;
  ConsistencyConfig consistency;

  std::vector<Validator> validators;
  double threshold_fraction = 2.0 / 3.0;
  double slash_fraction = 0.5;  // 0 disables slashing

  std::map<std::string, std::string> port_states;  // location -> authority
  std::vector<VesselSpec> vessels;
  std::vector<Fault> faults;

  std::optional<std::string> atlas_path;  // builtin atlas when absent
  GasSchedule gas = GasSchedule::standard();

  /// Throws ConfigError listing every violation.
  static FleetScenario from_json(const nlohmann::json& doc);
  static FleetScenario load(const std::string& path);

  /// Re-checks the assembled scenario; returns all violations (empty = valid).
  std::vector<std::string> validate() const;

  EcaAtlas load_atlas() const;
};

}  // namespace marichain
