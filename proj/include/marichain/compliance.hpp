#pragma once

#include <functional>
#include <map>
#include <string>

#include "marichain/geofence.hpp"
#include "marichain/model.hpp"

namespace marichain {

enum class AreaKind { Eca, NonEca };

/// Outcome of the binary compliance function: bit = 1 iff the measured value
/// is at or below the applied limit. The message uniquely determines
/// (bit, area).
struct ComplianceResult {
  int bit = 0;
  double limit_applied = 0.0;  // percent
  AreaKind area = AreaKind::NonEca;
  std::string message;
};

/// 0.10% inside an ECA, 0.50% outside.
double sulfur_limit(bool in_eca);

/// Inclusive comparison against the applicable limit. Throws
/// std::invalid_argument for negative or non-finite values (those should have
/// been removed by validation).
ComplianceResult evaluate_sulfur(double value_percent, bool in_eca);

using RegulationFn = std::function<ComplianceResult(const DataPoint&, const EcaAtlas&)>;

/// Dispatch table keyed by regulation identifier. Additional annexes plug in
/// without touching the pipeline. The default-constructed registry knows
/// "MARPOL-VI-R14" (sulfur: resolve the area via the atlas, then apply the
/// sulfur limits).
class RegulationRegistry {
public:
  RegulationRegistry();

  void add(std::string regulation_id, RegulationFn fn);
  bool contains(const std::string& regulation_id) const;

  /// Throws NotFoundError for an unknown regulation identifier.
  ComplianceResult evaluate(const DataPoint& d, const EcaAtlas& atlas) const;

private:
  std::map<std::string, RegulationFn> rules_;
};

/// Evaluates against the default registry.
ComplianceResult evaluate(const DataPoint& d, const EcaAtlas& atlas);

}  // namespace marichain
