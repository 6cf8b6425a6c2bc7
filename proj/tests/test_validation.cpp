#include <doctest.h>

#include <algorithm>
#include <vector>

#include "marichain/rng.hpp"
#include "marichain/validation.hpp"

using namespace marichain;

namespace {

SensorReading reading(double value, long long k = 0, double wall = 0.0,
                      double calib = 1e15) {
  return SensorReading{"s1", QuantityKind::SulfurContentPercent, value, k, wall, calib};
}

DataPoint point_for(const SensorReading& r) {
  DataPoint d;
  d.vessel_imo = 9074729;
  d.regulation = "MARPOL-VI-R14";
  d.value = r.value;
  d.timestamp = r.time_index;
  d.position = {57.0, 20.0};
  return d;
}

const ValidationRules kRules{0.0, 5.0, true, 300.0};

}  // namespace

TEST_CASE("validate: in-range reading with valid calibration passes") {
  const auto r = reading(0.45);
  CHECK(validate(point_for(r), r, kRules, 0.0).valid);
  CHECK(validate(point_for(r), r, kRules, 0.0).reason == VerdictReason::Ok);
}

TEST_CASE("validate: physically implausible value is out_of_range") {
  const auto r = reading(7.0);
  const auto v = validate(point_for(r), r, kRules, 0.0);
  CHECK_FALSE(v.valid);
  CHECK(v.reason == VerdictReason::OutOfRange);
}

TEST_CASE("validate: expired calibration") {
  auto r = reading(0.45);
  r.calibration_expiry = 99.0;
  const auto v = validate(point_for(r), r, kRules, 100.0);
  CHECK_FALSE(v.valid);
  CHECK(v.reason == VerdictReason::CalibrationExpired);

  // Expiry exactly at `now` is still valid (expired means strictly before).
  r.calibration_expiry = 100.0;
  r.wall_time = 100.0;
  CHECK(validate(point_for(r), r, kRules, 100.0).valid);

  // Not required -> not checked.
  ValidationRules relaxed = kRules;
  relaxed.calibration_required = false;
  r.calibration_expiry = 0.0;
  CHECK(validate(point_for(r), r, relaxed, 100.0).valid);
}

TEST_CASE("validate: stale clock") {
  auto r = reading(0.45);
  r.wall_time = 1000.0;
  const auto v = validate(point_for(r), r, kRules, 0.0);
  CHECK_FALSE(v.valid);
  CHECK(v.reason == VerdictReason::StaleClock);

  // Exactly at the skew bound is acceptable.
  r.wall_time = 300.0;
  CHECK(validate(point_for(r), r, kRules, 0.0).valid);
}

TEST_CASE("validate: malformed wins over every other reason") {
  auto r = reading(-1.0);  // negative value: malformed, not out_of_range
  r.calibration_expiry = 0.0;
  r.wall_time = 99999.0;
  const auto v = validate(point_for(r), r, kRules, 10.0);
  CHECK_FALSE(v.valid);
  CHECK(v.reason == VerdictReason::Malformed);

  auto nan_reading = reading(std::numeric_limits<double>::quiet_NaN());
  CHECK(validate(point_for(nan_reading), nan_reading, kRules, 0.0).reason ==
        VerdictReason::Malformed);

  // Data point whose timestamp disagrees with the reading.
  auto ok = reading(0.45);
  auto d = point_for(ok);
  d.timestamp = ok.time_index + 1;
  CHECK(validate(d, ok, kRules, 0.0).reason == VerdictReason::Malformed);
}

TEST_CASE("pair_consistency: inclusive threshold") {
  CHECK(pair_consistency(0.45, 0.45, 0.0) == 1);
  CHECK(pair_consistency(0.45, 0.47, 0.02) == 1);  // |diff| == epsilon exactly
  CHECK(pair_consistency(0.10, 0.30, 0.05) == 0);
  CHECK_THROWS_AS(pair_consistency(0.1, 0.2, -0.1), std::invalid_argument);
}

TEST_CASE("pair_consistency: monotone in epsilon") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double a = rng.uniform(0.0, 1.0);
    const double b = rng.uniform(0.0, 1.0);
    const double eps = rng.uniform(0.0, 0.5);
    const double wider = eps + rng.uniform(0.0, 0.5);
    CHECK(pair_consistency(a, b, wider) >= pair_consistency(a, b, eps));
  }
}

TEST_CASE("window_score: unanimous and mixed windows") {
  const std::vector<int> ones(10, 1);
  CHECK(window_score(ones) == 1.0);
  const std::vector<int> bits{1, 0, 1, 0};
  CHECK(window_score(bits) == 0.5);
  CHECK_THROWS_AS(window_score(std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("window_score: equals brute-force sum/length on 1000 random windows") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 1 + rng.next_u64() % 64;
    std::vector<int> bits(len);
    long long sum = 0;
    for (auto& b : bits) {
      b = static_cast<int>(rng.next_u64() & 1);
      sum += b;  // the oracle: plain sum divided by length
    }
    CHECK(window_score(bits) == doctest::Approx(static_cast<double>(sum) /
                                                static_cast<double>(len)).epsilon(1e-15));
  }
}

TEST_CASE("window_score: permutation invariant") {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> bits(16);
    for (auto& b : bits) b = static_cast<int>(rng.next_u64() & 1);
    std::vector<int> shuffled = bits;
    // Fisher-Yates with the deterministic stream.
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
    }
    CHECK(window_score(bits) == window_score(shuffled));
  }
}

TEST_CASE("mark_suspect: strictly below gamma") {
  CHECK_FALSE(mark_suspect(1.0, 0.8));
  CHECK(mark_suspect(0.5, 0.8));
  CHECK_FALSE(mark_suspect(0.8, 0.8));  // equality is not suspect
}

TEST_CASE("tracker: a disagreeing pair excludes both sensors") {
  ConsistencyTracker tracker({0.02, 0.8, 4});
  const auto suspects = tracker.update({{"a", 0.10}, {"b", 0.40}});
  CHECK(suspects == std::set<std::string>{"a", "b"});
}

TEST_CASE("tracker: a concordant third sensor rehabilitates the healthy one") {
  ConsistencyTracker tracker({0.02, 0.8, 4});
  // b is stuck far away; a and c agree.
  const auto suspects = tracker.update({{"a", 0.10}, {"b", 0.90}, {"c", 0.11}});
  CHECK(suspects == std::set<std::string>{"b"});
}

TEST_CASE("tracker: exclusion never touches sensors outside flagged pairs") {
  ConsistencyTracker tracker({0.02, 0.8, 4});
  // d and e agree with each other but not with the (a, b) quarrel; all pairs
  // across the two groups disagree, so a and b lose all their pairs only if
  // even d/e disagree with them. Here d agrees with a: a survives.
  const auto suspects = tracker.update({{"a", 0.10}, {"b", 0.90}, {"d", 0.10}, {"e", 0.105}});
  CHECK(suspects == std::set<std::string>{"b"});
}

TEST_CASE("tracker: window recovery clears the suspect flag") {
  ConsistencyTracker tracker({0.02, 0.6, 2});
  CHECK(tracker.update({{"a", 0.1}, {"b", 0.9}}) == std::set<std::string>{"a", "b"});
  // Agreement pushes the 2-tick window mean to 0.5, still below 0.6.
  CHECK(tracker.update({{"a", 0.1}, {"b", 0.1}}) == std::set<std::string>{"a", "b"});
  // Second agreeing tick: window = {1, 1}, mean 1.0 -> cleared.
  CHECK(tracker.update({{"a", 0.1}, {"b", 0.1}}).empty());
}

TEST_CASE("tracker: lone sensor is never suspect") {
  ConsistencyTracker tracker({0.02, 0.8, 4});
  CHECK(tracker.update({{"a", 9.99}}).empty());
}
