#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "marichain/model.hpp"
#include "marichain/rng.hpp"

namespace marichain {

/// 128-bit identifier assigned to every committed data point.
struct ComplianceId {
  std::array<std::uint8_t, 16> bytes{};

  std::string hex() const;
  static ComplianceId from_hex(std::string_view hex);  // strict lowercase, throws EncodingError

  auto operator<=>(const ComplianceId&) const = default;
};

/// Draws a fresh id from the given stream. Deterministic for a given seed;
/// 128 random bits make collisions negligible at desk scale.
ComplianceId generate_compliance_id(Rng& rng);

struct LedgerEntry {
  ComplianceId id;
  Digest digest;           // hash of the committed data point
  int compliance_bit = 0;  // 1 compliant, 0 non-compliant
  long long vessel_imo = 0;
  long long timestamp = 0;  // t_k
};

struct Approval {
  std::string validator_id;
  double stake = 0.0;
};

/// One ledger block. block_hash covers (height, prev_hash, entries,
/// proposer): the vote record is attached after validators have voted on that
/// hash, so it cannot be part of the preimage. record_digest covers the whole
/// serialized record including approvals and is what makes any byte of the
/// persisted file tamper-evident.
struct Block {
  long long height = 0;
  Digest prev_hash;
  std::vector<LedgerEntry> entries;
  std::string proposer_id;
  std::vector<Approval> approvals;
  Digest block_hash;
  Digest record_digest;
};

/// Recomputes the hash over (height, prev_hash, entries, proposer).
Digest compute_block_hash(const Block& b);

/// Digest of the block's canonical serialization (approvals included,
/// record_digest itself excluded).
Digest compute_record_digest(const Block& b);

/// Canonical JSON for one block, without the record_digest field.
nlohmann::json block_to_json(const Block& b);

/// Strict parse; throws EncodingError / nlohmann::json::exception on any
/// missing field, wrong type, or non-canonical hex.
Block block_from_json(const nlohmann::json& j);

/// Append-only chain of blocks. Heights are consecutive from 0 and each
/// prev_hash equals the predecessor's block_hash; blocks enter only through
/// append_block (or the file loader), so compliance ids never disappear.
///
/// One writer may extend a chain at a time; concurrent readers may query a
/// snapshot freely. Chains are plain values and can be handed between threads.
class Chain {
public:
  /// Height-0 block: zero prev_hash, no entries, no proposer.
  static Chain genesis();

  /// Wraps already-parsed blocks without verification (used by the loader;
  /// run verify_chain afterwards).
  static Chain from_blocks(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& tip() const { return blocks_.back(); }
  long long next_height() const { return static_cast<long long>(blocks_.size()); }
  bool contains_id(const ComplianceId& id) const { return ids_.count(id) > 0; }

  /// Total number of committed entries (genesis carries none).
  std::size_t entry_count() const;

private:
  Chain() = default;

  std::vector<Block> blocks_;
  std::set<ComplianceId> ids_;

  friend class ChainMutator;
};

enum class AppendResult {
  Appended,
  NotApproved,
  EmptyBlock,
  BadLink,
  BadHash,
  BadEntry,
  DuplicateId,
};

std::string_view append_result_name(AppendResult r);

/// Builds the candidate at tip+1 bundling the pending entries (compliant and
/// non-compliant alike). Throws std::invalid_argument on an empty batch.
Block assemble_block(std::vector<LedgerEntry> pending, std::string proposer_id,
                     const Chain& chain);

/// Commits a candidate whose vote reached the threshold (`approved`). The
/// chain is left untouched unless the result is Appended.
AppendResult append_block(Chain& chain, Block candidate, std::vector<Approval> approvals,
                          bool approved);

/// Recomputes every hash and linkage. Returns the lowest failing height, or
/// nullopt when the whole chain is intact.
std::optional<long long> verify_chain(const Chain& chain);

/// Writes the chain as one JSON record per line (first line = genesis).
/// The file is append-only: persisting an extended chain appends the new
/// blocks and never rewrites existing records. Throws LedgerIoError if the
/// file diverges from the chain.
void persist(const Chain& chain, const std::string& path);

/// Parses a ledger file. Throws LedgerIoError naming the offending line on
/// any unreadable or unparseable record. Does not verify hashes; run
/// verify_chain / verify_ledger_file for that.
Chain load_ledger(const std::string& path);

/// Full tamper check against the raw file bytes: per-record digest over the
/// bytes as stored, then every chain invariant. Returns the first bad height,
/// or nullopt if the file is intact. Throws LedgerIoError for file-level
/// problems (unreadable, empty, truncated final record).
std::optional<long long> verify_ledger_file(const std::string& path);

}  // namespace marichain
