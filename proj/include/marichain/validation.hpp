#pragma once

#include <deque>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "marichain/model.hpp"

namespace marichain {

/// Per-reading integrity checks applied before anything touches the chain.
struct ValidationRules {
  double value_min = 0.0;
  double value_max = 5.0;  // percent; sulfur beyond this is physically implausible
  bool calibration_required = true;
  double max_clock_skew = 300.0;  // seconds
};

/// Cross-sensor consistency parameters: pair threshold epsilon, suspect
/// threshold gamma, and the trailing window length in time indices.
struct ConsistencyConfig {
  double epsilon = 0.02;  // same units as the reading value
  double gamma = 0.8;     // in [0, 1]
  int window_length = 12; // >= 1
};

enum class VerdictReason {
  Ok,
  Malformed,
  OutOfRange,
  CalibrationExpired,
  StaleClock,
  SuspectSensor,
};

std::string_view reason_name(VerdictReason reason);

struct ValidationVerdict {
  bool valid = false;
  VerdictReason reason = VerdictReason::Malformed;

  static ValidationVerdict ok() { return {true, VerdictReason::Ok}; }
  static ValidationVerdict fail(VerdictReason r) { return {false, r}; }
};

/// Validates one reading against the rules. Failures are verdicts, never
/// exceptions; the first failing reason wins, checked in the fixed order
/// malformed, out_of_range, calibration_expired, stale_clock.
ValidationVerdict validate(const DataPoint& d, const SensorReading& r,
                           const ValidationRules& rules, double now);

/// 1 iff |r_a - r_b| <= epsilon (inclusive). Requires epsilon >= 0.
int pair_consistency(double r_a, double r_b, double epsilon);

/// Arithmetic mean of the window's bits. Throws std::invalid_argument on an
/// empty window (the mean is undefined).
double window_score(std::span<const int> bits);

/// True iff the score is strictly below gamma.
bool mark_suspect(double score, double gamma);

/// Maintains a trailing consistency window per sensor pair and decides which
/// sensors to exclude at each time index.
///
/// A sensor is suspect at a tick iff it took part in at least one evaluated
/// pair and every one of its evaluated pairs is flagged. Two lone sensors that
/// disagree are therefore both excluded; with three sensors, a partner that
/// stays concordant keeps its side of a flagged pair in play, so only the
/// actual outlier drops out.
///
/// Not safe for concurrent mutation: a tracker belongs to one pipeline stage.
class ConsistencyTracker {
public:
  explicit ConsistencyTracker(ConsistencyConfig config);

  /// Feed the valid readings of one time index (sensor id -> value) and get
  /// back the sensors to exclude for that index. Pairs with a missing side
  /// are not updated.
  std::set<std::string> update(const std::map<std::string, double>& readings);

  /// Current window score for a pair, or -1 if the pair has no history.
  double pair_score(const std::string& a, const std::string& b) const;

  const ConsistencyConfig& config() const { return config_; }

private:
  using PairKey = std::pair<std::string, std::string>;
  static PairKey key(const std::string& a, const std::string& b);

  ConsistencyConfig config_;
  std::map<PairKey, std::deque<int>> windows_;
};

}  // namespace marichain
