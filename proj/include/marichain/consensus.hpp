#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "marichain/ledger.hpp"
#include "marichain/rng.hpp"

namespace marichain {

struct Validator {
  std::string id;
  double stake = 0.0;  // p_j, non-negative
  bool honest = true;  // simulation fault flag: dishonest validators invert verification
};

/// Immutable roster with a stake-weighted approval threshold in (0.5, 1].
/// The default 2/3 is the stricter (supermajority) reading; pass a value just
/// above 0.5 for a simple majority. Mutation happens only through slash(),
/// which returns a new set. Construction requires positive total stake;
/// slashing may later drive the total to zero, at which point proposer
/// selection refuses to run.
class ValidatorSet {
public:
  ValidatorSet(std::vector<Validator> validators, double threshold_fraction = 2.0 / 3.0);

  const std::vector<Validator>& validators() const { return validators_; }
  double threshold_fraction() const { return threshold_fraction_; }
  double total_stake() const;
  const Validator* find(std::string_view id) const;

  /// P_j = p_j / sum(p_v); sums to 1 whenever total stake is positive.
  std::vector<double> selection_probabilities() const;

private:
  ValidatorSet() = default;

  friend ValidatorSet slash(const ValidatorSet&, std::string_view, double);

  std::vector<Validator> validators_;
  double threshold_fraction_ = 2.0 / 3.0;
};

struct VoteRecord {
  Digest block_hash;
  std::vector<Approval> approvals;
  bool approved = false;  // approving stake >= threshold_fraction * total stake
};

/// Stake-weighted proposer selection: validator j wins with probability
/// p_j / sum(p_v), drawn by inverse CDF over the cumulative stake vector with
/// a single uniform draw. Deterministic given the rng state. Throws
/// std::invalid_argument when the total stake is zero.
const Validator& select_proposer(const ValidatorSet& set, Rng& rng);

/// What an honest validator checks before approving a candidate: linkage to
/// the local tip plus recomputed block hash and well-formed entries.
bool verify_candidate(const Block& candidate, const Chain& chain);

/// Block-local verification (no chain context): recomputed hash and entry
/// sanity. This is what exposes a proposer who corrupted a bundled entry.
bool verify_block_content(const Block& block);

/// Every honest validator approves iff its local verification passes;
/// dishonest ones invert the answer. Deterministic given set and block.
VoteRecord vote(const ValidatorSet& set, const Block& candidate, const Chain& chain);

/// Multiplicative stake reduction: stake becomes stake * (1 - fraction).
/// Selection probabilities renormalize through the formula. Throws
/// NotFoundError for an unknown id, std::invalid_argument for a fraction
/// outside (0, 1].
ValidatorSet slash(const ValidatorSet& set, std::string_view validator_id, double fraction);

/// If the voted block fails independent verification, the proposer and every
/// validator that approved it are slashed by `fraction`. A valid block leaves
/// the set untouched; so does rejecting one.
ValidatorSet detect_and_slash(const ValidatorSet& set, const VoteRecord& record,
                              const Block& block, double fraction = 0.5);

}  // namespace marichain
