#include "marichain/model.hpp"

#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "marichain/errors.hpp"

namespace marichain {

namespace {

constexpr char kSeparator = '\x1f';
constexpr char kHexChars[] = "0123456789abcdef";

int hex_nibble_lower(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;  // uppercase and everything else: not canonical
}

void require_separator_free(std::string_view field, std::string_view what) {
  if (field.find(kSeparator) != std::string_view::npos) {
    throw EncodingError(std::string(what) + " contains the reserved separator byte 0x1F");
  }
}

}  // namespace

std::string Digest::hex() const {
  std::string out;
  out.resize(64);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out[2 * i] = kHexChars[bytes[i] >> 4];
    out[2 * i + 1] = kHexChars[bytes[i] & 0x0f];
  }
  return out;
}

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw EncodingError("digest hex must be 64 characters, got " + std::to_string(hex.size()));
  }
  Digest d;
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_nibble_lower(hex[2 * i]);
    const int lo = hex_nibble_lower(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw EncodingError("digest hex contains a non-canonical character");
    }
    d.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return d;
}

Digest sha256(std::string_view payload) {
  Digest d;
  unsigned int len = 0;
  if (EVP_Digest(payload.data(), payload.size(), d.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != d.bytes.size()) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  return d;
}

std::string render_fixed6(double v) {
  if (!std::isfinite(v)) {
    throw EncodingError("cannot render non-finite value");
  }
  // Scaled-integer rendering keeps the output independent of the C locale.
  if (std::abs(v) >= 9.0e12) {
    throw EncodingError("value too large for fixed rendering");
  }
  long long scaled = std::llround(v * 1e6);
  const bool negative = scaled < 0;
  unsigned long long mag = negative ? static_cast<unsigned long long>(-scaled)
                                    : static_cast<unsigned long long>(scaled);
  const unsigned long long whole = mag / 1000000ULL;
  const unsigned long long frac = mag % 1000000ULL;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%llu.%06llu", (negative && mag != 0) ? "-" : "", whole, frac);
  return buf;
}

bool is_valid_position(const GeoPosition& p) {
  return std::isfinite(p.latitude) && std::isfinite(p.longitude) &&
         p.latitude >= -90.0 && p.latitude <= 90.0 &&
         p.longitude >= -180.0 && p.longitude <= 180.0;
}

bool is_valid_imo(long long imo) { return imo >= 1000000 && imo <= 9999999; }

std::string_view quantity_name(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::SulfurContentPercent:
      return "sulfur-content-percent";
  }
  return "unknown";
}

std::string canonical_encode(const DataPoint& d) {
  if (!is_valid_imo(d.vessel_imo)) {
    throw EncodingError("vessel imo is not a 7-digit positive integer");
  }
  if (d.regulation.empty()) {
    throw EncodingError("regulation identifier is empty");
  }
  require_separator_free(d.regulation, "regulation");
  if (d.timestamp < 0) {
    throw EncodingError("timestamp is negative");
  }
  if (!is_valid_position(d.position)) {
    throw EncodingError("position out of range");
  }

  std::string out;
  out.reserve(96);
  out += std::to_string(d.vessel_imo);
  out += kSeparator;
  out += d.regulation;
  out += kSeparator;
  out += quantity_name(d.quantity);
  out += ':';
  out += render_fixed6(d.value);
  out += kSeparator;
  out += std::to_string(d.timestamp);
  out += kSeparator;
  out += render_fixed6(d.position.latitude);
  out += ',';
  out += render_fixed6(d.position.longitude);
  return out;
}

Digest hash_data_point(const DataPoint& d) { return sha256(canonical_encode(d)); }

}  // namespace marichain
