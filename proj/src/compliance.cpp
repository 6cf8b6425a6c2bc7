#include "marichain/compliance.hpp"

#include <cmath>
#include <stdexcept>

#include "marichain/errors.hpp"

namespace marichain {

double sulfur_limit(bool in_eca) { return in_eca ? 0.10 : 0.50; }

ComplianceResult evaluate_sulfur(double value_percent, bool in_eca) {
  if (!std::isfinite(value_percent) || value_percent < 0.0) {
    throw std::invalid_argument("sulfur value must be finite and non-negative");
  }
  const double limit = sulfur_limit(in_eca);
  ComplianceResult result;
  result.limit_applied = limit;
  result.area = in_eca ? AreaKind::Eca : AreaKind::NonEca;
  result.bit = value_percent <= limit ? 1 : 0;
  if (in_eca) {
    result.message = result.bit ? "Compliant - Below 0.10%" : "Non-compliant - Above 0.10%";
  } else {
    result.message = result.bit ? "Compliant - Below 0.50%" : "Non-compliant - Above 0.50%";
  }
  return result;
}

RegulationRegistry::RegulationRegistry() {
  add("MARPOL-VI-R14", [](const DataPoint& d, const EcaAtlas& atlas) {
    const EcaHit hit = is_in_eca(d.position, atlas);
    return evaluate_sulfur(d.value, hit.inside);
  });
}

void RegulationRegistry::add(std::string regulation_id, RegulationFn fn) {
  rules_[std::move(regulation_id)] = std::move(fn);
}

bool RegulationRegistry::contains(const std::string& regulation_id) const {
  return rules_.count(regulation_id) > 0;
}

ComplianceResult RegulationRegistry::evaluate(const DataPoint& d, const EcaAtlas& atlas) const {
  auto it = rules_.find(d.regulation);
  if (it == rules_.end()) {
    throw NotFoundError("unknown regulation identifier: " + d.regulation);
  }
  return it->second(d, atlas);
}

ComplianceResult evaluate(const DataPoint& d, const EcaAtlas& atlas) {
  static const RegulationRegistry registry;
  return registry.evaluate(d, atlas);
}

}  // namespace marichain
