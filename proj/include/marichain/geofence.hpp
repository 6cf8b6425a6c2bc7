#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "marichain/model.hpp"

namespace marichain {

/// Emission Control Area as a simple (non-self-intersecting) polygon.
struct EcaRegion {
  std::string name;
  std::vector<GeoPosition> polygon;  // >= 3 vertices
};

/// Immutable set of ECA regions. All validation happens at construction;
/// containment queries never fail. Queries are pure and thread-safe.
class EcaAtlas {
public:
  /// Coarse rectangular stand-ins for the Baltic Sea, North Sea, North
  /// American coastal band, and US Caribbean areas. These are simulation
  /// placeholders, not regulatory boundary data; supply an atlas file for
  /// anything resembling real geometry. Regions crossing the antimeridian
  /// must be split in two by the atlas author.
  static EcaAtlas builtin();

  /// Throws ConfigError listing every problem found (short polygon,
  /// out-of-range vertex, self-intersection, duplicate name, ...).
  static EcaAtlas from_json(const nlohmann::json& doc);

  /// Reads a JSON atlas file: {"regions":[{"name":..., "vertices":[[lat,lon],...]}]}
  static EcaAtlas load(const std::string& path);

  const std::vector<EcaRegion>& regions() const { return regions_; }

private:
  explicit EcaAtlas(std::vector<EcaRegion> regions);

  std::vector<EcaRegion> regions_;
};

/// Even-odd ray-casting containment with the boundary counted as inside
/// (the stricter limit applies at the edge).
bool point_in_polygon(const GeoPosition& p, const std::vector<GeoPosition>& polygon);

struct EcaHit {
  bool inside = false;
  std::string region;  // first containing region's name, empty when outside
};

EcaHit is_in_eca(const GeoPosition& p, const EcaAtlas& atlas);

}  // namespace marichain
