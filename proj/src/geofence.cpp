#include "marichain/geofence.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "marichain/errors.hpp"

namespace marichain {

namespace {

// Planar geometry on (x=longitude, y=latitude). Coordinates are quantized to
// six decimals in practice, so exact double arithmetic is dependable here.

double orient(const GeoPosition& a, const GeoPosition& b, const GeoPosition& c) {
  return (b.longitude - a.longitude) * (c.latitude - a.latitude) -
         (b.latitude - a.latitude) * (c.longitude - a.longitude);
}

bool within_box(const GeoPosition& p, const GeoPosition& a, const GeoPosition& b) {
  return std::min(a.longitude, b.longitude) <= p.longitude &&
         p.longitude <= std::max(a.longitude, b.longitude) &&
         std::min(a.latitude, b.latitude) <= p.latitude &&
         p.latitude <= std::max(a.latitude, b.latitude);
}

bool on_segment(const GeoPosition& p, const GeoPosition& a, const GeoPosition& b) {
  return orient(a, b, p) == 0.0 && within_box(p, a, b);
}

/// Inclusive segment intersection test.
bool segments_intersect(const GeoPosition& a, const GeoPosition& b,
                        const GeoPosition& c, const GeoPosition& d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && o1 != 0 && o2 != 0 &&
      ((o3 > 0) != (o4 > 0)) && o3 != 0 && o4 != 0) {
    return true;
  }
  if (o1 == 0 && within_box(c, a, b)) return true;
  if (o2 == 0 && within_box(d, a, b)) return true;
  if (o3 == 0 && within_box(a, c, d)) return true;
  if (o4 == 0 && within_box(b, c, d)) return true;
  return false;
}

void validate_region(const EcaRegion& region, std::vector<std::string>& violations) {
  const auto& poly = region.polygon;
  if (region.name.empty()) {
    violations.push_back("region with empty name");
  }
  if (poly.size() < 3) {
    violations.push_back("region '" + region.name + "' has fewer than 3 vertices");
    return;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (!is_valid_position(poly[i])) {
      violations.push_back("region '" + region.name + "' vertex " + std::to_string(i) +
                           " out of coordinate range");
      return;
    }
  }
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    if (a.latitude == b.latitude && a.longitude == b.longitude) {
      violations.push_back("region '" + region.name + "' has a zero-length edge at vertex " +
                           std::to_string(i));
      return;
    }
  }
  // Simplicity: no two non-adjacent edges may touch.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        violations.push_back("region '" + region.name + "' is self-intersecting (edges " +
                             std::to_string(i) + " and " + std::to_string(j) + ")");
        return;
      }
    }
  }
}

}  // namespace

EcaAtlas::EcaAtlas(std::vector<EcaRegion> regions) : regions_(std::move(regions)) {
  std::vector<std::string> violations;
  std::set<std::string> names;
  for (const auto& region : regions_) {
    validate_region(region, violations);
    if (!names.insert(region.name).second) {
      violations.push_back("duplicate region name '" + region.name + "'");
    }
  }
  if (!violations.empty()) {
    throw ConfigError(std::move(violations));
  }
}

EcaAtlas EcaAtlas::builtin() {
  auto box = [](std::string name, double lat_lo, double lat_hi, double lon_lo, double lon_hi) {
    return EcaRegion{std::move(name),
                     {{lat_lo, lon_lo}, {lat_lo, lon_hi}, {lat_hi, lon_hi}, {lat_hi, lon_lo}}};
  };
  return EcaAtlas({
      box("Baltic Sea", 53.0, 66.0, 10.0, 30.0),
      box("North Sea", 51.0, 62.0, -4.0, 9.0),
      box("North American Coastal", 24.0, 50.0, -130.0, -60.0),
      box("US Caribbean", 16.0, 19.5, -68.5, -64.0),
  });
}

EcaAtlas EcaAtlas::from_json(const nlohmann::json& doc) {
  std::vector<std::string> violations;
  std::vector<EcaRegion> regions;
  if (!doc.is_object() || !doc.contains("regions") || !doc["regions"].is_array()) {
    throw ConfigError({"atlas document must be an object with a 'regions' array"});
  }
  for (const auto& r : doc["regions"]) {
    EcaRegion region;
    if (!r.is_object() || !r.contains("name") || !r["name"].is_string() ||
        !r.contains("vertices") || !r["vertices"].is_array()) {
      violations.push_back("atlas region must have a 'name' string and 'vertices' array");
      continue;
    }
    region.name = r["name"].get<std::string>();
    for (const auto& v : r["vertices"]) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        violations.push_back("region '" + region.name + "' vertex must be a [lat, lon] pair");
        continue;
      }
      region.polygon.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    regions.push_back(std::move(region));
  }
  if (!violations.empty()) {
    throw ConfigError(std::move(violations));
  }
  return EcaAtlas(std::move(regions));
}

EcaAtlas EcaAtlas::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError({"cannot open atlas file: " + path});
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({"atlas file is not valid JSON: " + std::string(e.what())});
  }
  return from_json(doc);
}

bool point_in_polygon(const GeoPosition& p, const std::vector<GeoPosition>& polygon) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, polygon[i], polygon[(i + 1) % n])) {
      return true;  // boundary counts as inside
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double yi = polygon[i].latitude, xi = polygon[i].longitude;
    const double yj = polygon[j].latitude, xj = polygon[j].longitude;
    if ((yi > p.latitude) != (yj > p.latitude)) {
      const double x_cross = (xj - xi) * (p.latitude - yi) / (yj - yi) + xi;
      if (p.longitude < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

EcaHit is_in_eca(const GeoPosition& p, const EcaAtlas& atlas) {
  for (const auto& region : atlas.regions()) {
    if (point_in_polygon(p, region.polygon)) {
      return {true, region.name};
    }
  }
  return {false, {}};
}

}  // namespace marichain
