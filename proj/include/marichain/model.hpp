#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace marichain {

/// 32-byte SHA-256 digest with a lowercase-hex rendering.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;

  /// Strict parse: exactly 64 lowercase hex characters. Uppercase is rejected
  /// so that a digest has a single canonical text form.
  static Digest from_hex(std::string_view hex);

  static Digest zero() { return Digest{}; }

  auto operator<=>(const Digest&) const = default;
};

/// SHA-256 over an arbitrary byte string.
Digest sha256(std::string_view payload);

/// Fixed six-decimal rendering used by every canonical encoding.
/// Locale-free, rounds half away from zero, never emits "-0.000000".
/// Throws EncodingError for non-finite or absurdly large values.
std::string render_fixed6(double v);

struct GeoPosition {
  double latitude = 0.0;   // degrees, [-90, 90]
  double longitude = 0.0;  // degrees, [-180, 180]
};

bool is_valid_position(const GeoPosition& p);

struct VesselIdentity {
  long long imo_number = 0;  // 7-digit positive integer
  std::string owner;
  std::string flag_state;
};

/// 7-digit positive integer check.
bool is_valid_imo(long long imo);

enum class QuantityKind { SulfurContentPercent };

std::string_view quantity_name(QuantityKind kind);

struct SensorReading {
  std::string sensor_id;
  QuantityKind quantity = QuantityKind::SulfurContentPercent;
  double value = 0.0;               // non-negative; percent by mass for sulfur
  long long time_index = 0;         // t_k, monotone non-decreasing per sensor
  double wall_time = 0.0;           // seconds since epoch (simulation clock)
  double calibration_expiry = 0.0;  // seconds since epoch
};

/// The committed measurement tuple: (vessel, regulation, status, timestamp)
/// plus the position and measured value the sulfur contract consumes.
struct DataPoint {
  long long vessel_imo = 0;
  std::string regulation;  // e.g. "MARPOL-VI-R14"
  QuantityKind quantity = QuantityKind::SulfurContentPercent;
  double value = 0.0;      // status: the raw measured value
  long long timestamp = 0; // equals the reading's time index t_k
  GeoPosition position;
};

/// Canonical byte encoding of a data point.
///
/// Fields are rendered as text and joined by the reserved separator byte 0x1F,
/// in the order vessel, regulation, status, timestamp, position:
///
///   <imo> 1F <regulation> 1F <kind>:<value 6dp> 1F <t_k> 1F <lat 6dp>,<lon 6dp>
///
/// The separator byte may not appear inside any field; numeric fields use
/// render_fixed6. Throws EncodingError on violation.
std::string canonical_encode(const DataPoint& d);

/// SHA-256 of the canonical encoding. Propagates EncodingError.
Digest hash_data_point(const DataPoint& d);

}  // namespace marichain
