#include "marichain/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "marichain/errors.hpp"

namespace marichain {

namespace {

std::optional<FaultKind> parse_fault_kind(const std::string& kind) {
  if (kind == "stuck") return FaultKind::Stuck;
  if (kind == "drift") return FaultKind::Drift;
  if (kind == "out_of_range") return FaultKind::OutOfRange;
  if (kind == "clock_skew") return FaultKind::ClockSkew;
  if (kind == "dishonest_validator") return FaultKind::DishonestValidator;
  return std::nullopt;
}

double get_number(const nlohmann::json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

GeoPosition parse_position(const nlohmann::json& j, std::vector<std::string>& violations,
                           const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    violations.push_back(where + ": position must be a [lat, lon] pair");
    return {};
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

FleetScenario FleetScenario::from_json(const nlohmann::json& doc) {
  std::vector<std::string> violations;
  FleetScenario s;

  if (!doc.is_object()) {
    throw ConfigError({"scenario document must be a JSON object"});
  }

  try {
    if (doc.contains("name")) s.name = doc.at("name").get<std::string>();
    if (doc.contains("seed")) s.seed = doc.at("seed").get<std::uint64_t>();
    s.duration_seconds = get_number(doc, "duration_seconds", s.duration_seconds);
    s.pull_interval_seconds = get_number(doc, "pull_interval_seconds", s.pull_interval_seconds);
    if (doc.contains("block_capacity")) s.block_capacity = doc.at("block_capacity").get<int>();
    if (doc.contains("block_time_range")) {
      const auto& range = doc.at("block_time_range");
      if (!range.is_array() || range.size() != 2) {
        violations.push_back("block_time_range must be [lo, hi]");
      } else {
        s.block_time_lo = range[0].get<double>();
        s.block_time_hi = range[1].get<double>();
      }
    }

    if (doc.contains("rules")) {
      const auto& r = doc.at("rules");
      s.rules.value_min = get_number(r, "value_min", s.rules.value_min);
      s.rules.value_max = get_number(r, "value_max", s.rules.value_max);
      if (r.contains("calibration_required")) {
        s.rules.calibration_required = r.at("calibration_required").get<bool>();
      }
      s.rules.max_clock_skew = get_number(r, "max_clock_skew", s.rules.max_clock_skew);
    }

    if (doc.contains("consistency")) {
      const auto& c = doc.at("consistency");
      s.consistency.epsilon = get_number(c, "epsilon", s.consistency.epsilon);
      s.consistency.gamma = get_number(c, "gamma", s.consistency.gamma);
      if (c.contains("window_length")) {
        s.consistency.window_length = c.at("window_length").get<int>();
      }
    }

    if (doc.contains("validators")) {
      const auto& v = doc.at("validators");
      s.threshold_fraction = get_number(v, "threshold_fraction", s.threshold_fraction);
      s.slash_fraction = get_number(v, "slash_fraction", s.slash_fraction);
      if (v.contains("members")) {
        for (const auto& m : v.at("members")) {
          Validator member;
          member.id = m.at("id").get<std::string>();
          member.stake = m.at("stake").get<double>();
          if (m.contains("honest")) member.honest = m.at("honest").get<bool>();
          s.validators.push_back(std::move(member));
        }
      }
    }
    if (s.validators.empty()) {
      // Single always-honest validator keeps trivial scenarios terse.
      s.validators.push_back({"v1", 1.0, true});
    }

    if (doc.contains("port_states")) {
      for (const auto& [location, authority] : doc.at("port_states").items()) {
        s.port_states[location] = authority.get<std::string>();
      }
    }

    if (doc.contains("atlas_path")) s.atlas_path = doc.at("atlas_path").get<std::string>();

    if (doc.contains("gas")) {
      const auto& g = doc.at("gas");
      s.gas.gas_price_token = get_number(g, "gas_price_token", s.gas.gas_price_token);
      s.gas.token_usd = get_number(g, "token_usd", s.gas.token_usd);
      s.gas.quote_setup_usd = get_number(g, "quote_setup_usd", s.gas.quote_setup_usd);
      s.gas.quote_compliant_upload_usd =
          get_number(g, "quote_compliant_upload_usd", s.gas.quote_compliant_upload_usd);
      s.gas.quote_non_compliant_upload_usd =
          get_number(g, "quote_non_compliant_upload_usd", s.gas.quote_non_compliant_upload_usd);
    }

    if (doc.contains("vessels")) {
      for (const auto& v : doc.at("vessels")) {
        VesselSpec vessel;
        vessel.identity.imo_number = v.at("imo").get<long long>();
        vessel.identity.owner = v.at("owner").get<std::string>();
        vessel.identity.flag_state = v.at("flag_state").get<std::string>();
        const std::string where = "vessel " + std::to_string(vessel.identity.imo_number);
        if (v.contains("position")) {
          vessel.position = parse_position(v.at("position"), violations, where);
        }
        if (v.contains("location")) vessel.location = v.at("location").get<std::string>();
        vessel.sulfur_percent = get_number(v, "sulfur_percent", vessel.sulfur_percent);
        if (v.contains("sulfur_schedule")) {
          for (const auto& phase : v.at("sulfur_schedule")) {
            vessel.sulfur_schedule.push_back({phase.at("from").get<double>(),
                                              phase.at("until").get<double>(),
                                              phase.at("value").get<double>()});
          }
        }
        if (v.contains("waypoints")) {
          for (const auto& w : v.at("waypoints")) {
            Waypoint wp;
            wp.from_time = w.at("from").get<double>();
            wp.position = parse_position(w.at("position"), violations, where + " waypoint");
            if (w.contains("location")) wp.location = w.at("location").get<std::string>();
            vessel.waypoints.push_back(std::move(wp));
          }
        }
        if (v.contains("sensors")) {
          for (const auto& sensor : v.at("sensors")) {
            SensorSpec spec;
            spec.id = sensor.at("id").get<std::string>();
            spec.calibration_expiry =
                get_number(sensor, "calibration_expiry", spec.calibration_expiry);
            vessel.sensors.push_back(std::move(spec));
          }
        }
        if (vessel.sensors.empty()) {
          vessel.sensors.push_back({"s1", 1e15});
        }
        s.vessels.push_back(std::move(vessel));
      }
    }

    if (doc.contains("faults")) {
      for (const auto& f : doc.at("faults")) {
        Fault fault;
        const auto kind = parse_fault_kind(f.at("kind").get<std::string>());
        if (!kind) {
          violations.push_back("unknown fault kind '" + f.at("kind").get<std::string>() + "'");
          continue;
        }
        fault.kind = *kind;
        fault.from_time = get_number(f, "from", 0.0);
        fault.until_time = get_number(f, "until", s.duration_seconds + 1.0);
        if (fault.kind == FaultKind::DishonestValidator) {
          fault.validator_id = f.at("validator").get<std::string>();
        } else {
          fault.imo = f.at("imo").get<long long>();
          fault.sensor_id = f.at("sensor").get<std::string>();
          if (fault.kind == FaultKind::Drift) {
            fault.value = f.at("offset").get<double>();
          } else if (fault.kind == FaultKind::ClockSkew) {
            fault.value = f.at("offset_seconds").get<double>();
          } else {
            fault.value = f.at("value").get<double>();
          }
        }
        s.faults.push_back(std::move(fault));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    violations.push_back(std::string("malformed scenario JSON: ") + e.what());
    throw ConfigError(std::move(violations));
  }

  auto more = s.validate();
  violations.insert(violations.end(), more.begin(), more.end());
  if (!violations.empty()) {
    throw ConfigError(std::move(violations));
  }
  return s;
}

FleetScenario FleetScenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError({"cannot open scenario file: " + path});
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({"scenario file is not valid JSON: " + std::string(e.what())});
  }
  return from_json(doc);
}

std::vector<std::string> FleetScenario::validate() const {
  std::vector<std::string> v;

  if (name.empty()) v.push_back("name must not be empty");
  if (!(duration_seconds > 0)) v.push_back("duration_seconds must be positive");
  if (!(pull_interval_seconds > 0)) v.push_back("pull_interval_seconds must be positive");
  if (block_capacity < 1) v.push_back("block_capacity must be at least 1");
  if (!(block_time_lo > 0) || !(block_time_lo <= block_time_hi)) {
    v.push_back("block_time_range must satisfy 0 < lo <= hi");
  }
  if (!(rules.value_min <= rules.value_max)) v.push_back("rules.value_min must be <= value_max");
  if (rules.max_clock_skew < 0) v.push_back("rules.max_clock_skew must be >= 0");
  if (consistency.epsilon < 0) v.push_back("consistency.epsilon must be >= 0");
  if (consistency.gamma < 0 || consistency.gamma > 1) {
    v.push_back("consistency.gamma must lie in [0, 1]");
  }
  if (consistency.window_length < 1) v.push_back("consistency.window_length must be >= 1");

  if (!(threshold_fraction > 0.5 && threshold_fraction <= 1.0)) {
    v.push_back("validators.threshold_fraction must lie in (0.5, 1]");
  }
  if (slash_fraction < 0 || slash_fraction > 1) {
    v.push_back("validators.slash_fraction must lie in [0, 1]");
  }
  std::set<std::string> validator_ids;
  double total_stake = 0.0;
  for (const auto& member : validators) {
    if (member.id.empty()) v.push_back("validator with empty id");
    if (!validator_ids.insert(member.id).second) {
      v.push_back("duplicate validator id '" + member.id + "'");
    }
    if (!(member.stake >= 0)) v.push_back("validator '" + member.id + "' has negative stake");
    total_stake += member.stake;
  }
  if (validators.empty()) v.push_back("validator set must not be empty");
  if (!(total_stake > 0)) v.push_back("total validator stake must be positive");

  for (const auto& [location, authority] : port_states) {
    if (location.empty() || authority.empty()) {
      v.push_back("port_states entries must have non-empty location and authority");
    }
  }

  std::set<long long> imos;
  for (const auto& vessel : vessels) {
    const std::string where = "vessel " + std::to_string(vessel.identity.imo_number);
    if (!is_valid_imo(vessel.identity.imo_number)) {
      v.push_back(where + ": imo must be a 7-digit positive integer");
    }
    if (!imos.insert(vessel.identity.imo_number).second) {
      v.push_back(where + ": duplicate imo");
    }
    if (vessel.identity.owner.empty() || vessel.identity.flag_state.empty()) {
      v.push_back(where + ": owner and flag_state must be non-empty");
    }
    if (vessel.identity.owner.find('\x1f') != std::string::npos ||
        vessel.identity.flag_state.find('\x1f') != std::string::npos) {
      v.push_back(where + ": owner/flag_state must not contain the separator byte");
    }
    if (!is_valid_position(vessel.position)) v.push_back(where + ": position out of range");
    if (!(vessel.sulfur_percent >= 0) || !std::isfinite(vessel.sulfur_percent)) {
      v.push_back(where + ": sulfur_percent must be finite and non-negative");
    }
    for (const auto& phase : vessel.sulfur_schedule) {
      if (!(phase.from_time <= phase.until_time)) {
        v.push_back(where + ": sulfur_schedule phase must satisfy from <= until");
      }
      if (!std::isfinite(phase.value)) {
        v.push_back(where + ": sulfur_schedule value must be finite");
      }
    }
    for (const auto& wp : vessel.waypoints) {
      if (!is_valid_position(wp.position)) v.push_back(where + ": waypoint position out of range");
    }
    std::set<std::string> sensor_ids;
    for (const auto& sensor : vessel.sensors) {
      if (sensor.id.empty()) v.push_back(where + ": sensor with empty id");
      if (!sensor_ids.insert(sensor.id).second) {
        v.push_back(where + ": duplicate sensor id '" + sensor.id + "'");
      }
    }
    if (vessel.sensors.empty()) v.push_back(where + ": at least one sensor required");
  }

  for (const auto& fault : faults) {
    if (!(fault.from_time <= fault.until_time)) {
      v.push_back("fault must satisfy from <= until");
    }
    if (fault.kind == FaultKind::DishonestValidator) {
      if (validator_ids.count(fault.validator_id) == 0) {
        v.push_back("fault references unknown validator '" + fault.validator_id + "'");
      }
    } else {
      bool found = false;
      for (const auto& vessel : vessels) {
        if (vessel.identity.imo_number != fault.imo) continue;
        for (const auto& sensor : vessel.sensors) {
          found = found || sensor.id == fault.sensor_id;
        }
      }
      if (!found) {
        v.push_back("fault references unknown sensor '" + fault.sensor_id + "' on vessel " +
                    std::to_string(fault.imo));
      }
    }
  }

  if (gas.gas_price_token <= 0 || gas.token_usd <= 0) {
    v.push_back("gas price and token rate must be positive");
  }

  return v;
}

EcaAtlas FleetScenario::load_atlas() const {
  if (atlas_path) {
    return EcaAtlas::load(*atlas_path);
  }
  return EcaAtlas::builtin();
}

}  // namespace marichain
