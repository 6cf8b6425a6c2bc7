#include "marichain/validation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace marichain {

std::string_view reason_name(VerdictReason reason) {
  switch (reason) {
    case VerdictReason::Ok: return "ok";
    case VerdictReason::Malformed: return "malformed";
    case VerdictReason::OutOfRange: return "out_of_range";
    case VerdictReason::CalibrationExpired: return "calibration_expired";
    case VerdictReason::StaleClock: return "stale_clock";
    case VerdictReason::SuspectSensor: return "suspect_sensor";
  }
  return "unknown";
}

ValidationVerdict validate(const DataPoint& d, const SensorReading& r,
                           const ValidationRules& rules, double now) {
  // Malformed covers type-invariant violations: non-finite or negative value,
  // negative time index, or a data point whose timestamp disagrees with the
  // reading it was built from.
  if (!std::isfinite(r.value) || r.value < 0.0 || r.time_index < 0 ||
      r.sensor_id.empty() || d.timestamp != r.time_index) {
    return ValidationVerdict::fail(VerdictReason::Malformed);
  }
  if (r.value < rules.value_min || r.value > rules.value_max) {
    return ValidationVerdict::fail(VerdictReason::OutOfRange);
  }
  if (rules.calibration_required && r.calibration_expiry < now) {
    return ValidationVerdict::fail(VerdictReason::CalibrationExpired);
  }
  if (std::abs(r.wall_time - now) > rules.max_clock_skew) {
    return ValidationVerdict::fail(VerdictReason::StaleClock);
  }
  return ValidationVerdict::ok();
}

int pair_consistency(double r_a, double r_b, double epsilon) {
  if (epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  return std::abs(r_a - r_b) <= epsilon ? 1 : 0;
}

double window_score(std::span<const int> bits) {
  if (bits.empty()) {
    throw std::invalid_argument("window_score of an empty window is undefined");
  }
  long long sum = 0;
  for (int b : bits) sum += b;
  return static_cast<double>(sum) / static_cast<double>(bits.size());
}

bool mark_suspect(double score, double gamma) { return score < gamma; }

ConsistencyTracker::ConsistencyTracker(ConsistencyConfig config) : config_(config) {
  if (config_.epsilon < 0.0 || config_.gamma < 0.0 || config_.gamma > 1.0 ||
      config_.window_length < 1) {
    throw std::invalid_argument("invalid consistency config");
  }
}

ConsistencyTracker::PairKey ConsistencyTracker::key(const std::string& a, const std::string& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

std::set<std::string> ConsistencyTracker::update(const std::map<std::string, double>& readings) {
  // evaluated pairs this tick -> flagged?
  std::map<std::string, int> pair_count;
  std::map<std::string, int> flagged_count;

  for (auto a = readings.begin(); a != readings.end(); ++a) {
    for (auto b = std::next(a); b != readings.end(); ++b) {
      auto& window = windows_[key(a->first, b->first)];
      window.push_back(pair_consistency(a->second, b->second, config_.epsilon));
      while (static_cast<int>(window.size()) > config_.window_length) {
        window.pop_front();
      }
      const std::vector<int> bits(window.begin(), window.end());
      const double score = window_score(bits);
      const bool flagged = mark_suspect(score, config_.gamma);
      for (const auto& id : {a->first, b->first}) {
        pair_count[id] += 1;
        flagged_count[id] += flagged ? 1 : 0;
      }
    }
  }

  std::set<std::string> suspects;
  for (const auto& [id, pairs] : pair_count) {
    if (pairs > 0 && flagged_count[id] == pairs) {
      suspects.insert(id);
    }
  }
  return suspects;
}

double ConsistencyTracker::pair_score(const std::string& a, const std::string& b) const {
  auto it = windows_.find(key(a, b));
  if (it == windows_.end() || it->second.empty()) return -1.0;
  const std::vector<int> bits(it->second.begin(), it->second.end());
  return window_score(bits);
}

}  // namespace marichain
