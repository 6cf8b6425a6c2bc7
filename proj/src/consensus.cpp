#include "marichain/consensus.hpp"

#include <set>
#include <stdexcept>

#include "marichain/errors.hpp"

namespace marichain {

namespace {

bool entry_valid(const LedgerEntry& e) {
  return (e.compliance_bit == 0 || e.compliance_bit == 1) && is_valid_imo(e.vessel_imo) &&
         e.timestamp >= 0;
}

}  // namespace

ValidatorSet::ValidatorSet(std::vector<Validator> validators, double threshold_fraction)
    : validators_(std::move(validators)), threshold_fraction_(threshold_fraction) {
  std::vector<std::string> violations;
  if (!(threshold_fraction_ > 0.5 && threshold_fraction_ <= 1.0)) {
    violations.push_back("threshold_fraction must lie in (0.5, 1]");
  }
  std::set<std::string> ids;
  double total = 0.0;
  for (const auto& v : validators_) {
    if (v.id.empty()) violations.push_back("validator with empty id");
    if (!ids.insert(v.id).second) violations.push_back("duplicate validator id '" + v.id + "'");
    if (!(v.stake >= 0.0)) violations.push_back("validator '" + v.id + "' has negative stake");
    total += v.stake;
  }
  if (validators_.empty()) violations.push_back("validator set is empty");
  if (!(total > 0.0)) violations.push_back("total stake must be positive");
  if (!violations.empty()) {
    throw ConfigError(std::move(violations));
  }
}

double ValidatorSet::total_stake() const {
  double total = 0.0;
  for (const auto& v : validators_) total += v.stake;
  return total;
}

const Validator* ValidatorSet::find(std::string_view id) const {
  for (const auto& v : validators_) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

std::vector<double> ValidatorSet::selection_probabilities() const {
  const double total = total_stake();
  std::vector<double> probs;
  probs.reserve(validators_.size());
  for (const auto& v : validators_) {
    probs.push_back(total > 0.0 ? v.stake / total : 0.0);
  }
  return probs;
}

const Validator& select_proposer(const ValidatorSet& set, Rng& rng) {
  const double total = set.total_stake();
  if (!(total > 0.0)) {
    throw std::invalid_argument("cannot select a proposer from an all-zero-stake set");
  }
  const double u = rng.uniform01() * total;
  double cumulative = 0.0;
  const Validator* last_positive = nullptr;
  for (const auto& v : set.validators()) {
    cumulative += v.stake;
    if (v.stake > 0.0) {
      last_positive = &v;
      if (u < cumulative) return v;
    }
  }
  // u == total can only happen through rounding; charge it to the last
  // positive-stake validator.
  return *last_positive;
}

bool verify_block_content(const Block& block) {
  if (block.entries.empty()) return false;
  for (const auto& e : block.entries) {
    if (!entry_valid(e)) return false;
  }
  return compute_block_hash(block) == block.block_hash;
}

bool verify_candidate(const Block& candidate, const Chain& chain) {
  return candidate.height == chain.next_height() &&
         candidate.prev_hash == chain.tip().block_hash && verify_block_content(candidate);
}

VoteRecord vote(const ValidatorSet& set, const Block& candidate, const Chain& chain) {
  const bool valid = verify_candidate(candidate, chain);
  VoteRecord record;
  record.block_hash = candidate.block_hash;
  double approving = 0.0;
  for (const auto& v : set.validators()) {
    const bool approves = v.honest ? valid : !valid;
    if (approves) {
      record.approvals.push_back({v.id, v.stake});
      approving += v.stake;
    }
  }
  record.approved = approving >= set.threshold_fraction() * set.total_stake();
  return record;
}

ValidatorSet slash(const ValidatorSet& set, std::string_view validator_id, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("slash fraction must lie in (0, 1]");
  }
  if (set.find(validator_id) == nullptr) {
    throw NotFoundError("unknown validator id: " + std::string(validator_id));
  }
  ValidatorSet updated;
  updated.validators_ = set.validators();
  updated.threshold_fraction_ = set.threshold_fraction();
  for (auto& v : updated.validators_) {
    if (v.id == validator_id) {
      v.stake *= (1.0 - fraction);
      if (v.stake < 0.0) v.stake = 0.0;
    }
  }
  return updated;
}

ValidatorSet detect_and_slash(const ValidatorSet& set, const VoteRecord& record,
                              const Block& block, double fraction) {
  if (verify_block_content(block)) {
    return set;
  }
  std::set<std::string> culprits;
  if (set.find(block.proposer_id) != nullptr) {
    culprits.insert(block.proposer_id);
  }
  for (const auto& approval : record.approvals) {
    if (set.find(approval.validator_id) != nullptr) {
      culprits.insert(approval.validator_id);
    }
  }
  ValidatorSet updated = set;
  for (const auto& id : culprits) {
    updated = slash(updated, id, fraction);
  }
  return updated;
}

}  // namespace marichain
