#include "marichain/ledger.hpp"

#include <fstream>
#include <stdexcept>

#include "marichain/errors.hpp"

namespace marichain {

namespace {

constexpr char kFieldSep = '\x1f';   // within one record
constexpr char kRecordSep = '\x1e';  // between entry records in the hash preimage

constexpr char kHexChars[] = "0123456789abcdef";

// Persisted line layout. The fixed scaffolding lets verify_ledger_file hash
// the exact stored bytes of the block object, closing the gap where two
// decimal spellings parse to the same double.
constexpr std::string_view kLinePrefix = "{\"block\":";
constexpr std::string_view kLineMid = ",\"record_digest\":\"";
constexpr std::string_view kLineSuffix = "\"}";

std::string entry_preimage(const LedgerEntry& e) {
  std::string s;
  s += e.id.hex();
  s += kFieldSep;
  s += e.digest.hex();
  s += kFieldSep;
  s += std::to_string(e.compliance_bit);
  s += kFieldSep;
  s += std::to_string(e.vessel_imo);
  s += kFieldSep;
  s += std::to_string(e.timestamp);
  return s;
}

bool entry_fields_valid(const LedgerEntry& e) {
  return (e.compliance_bit == 0 || e.compliance_bit == 1) && is_valid_imo(e.vessel_imo) &&
         e.timestamp >= 0;
}

}  // namespace

std::string ComplianceId::hex() const {
  std::string out;
  out.resize(32);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out[2 * i] = kHexChars[bytes[i] >> 4];
    out[2 * i + 1] = kHexChars[bytes[i] & 0x0f];
  }
  return out;
}

ComplianceId ComplianceId::from_hex(std::string_view hex) {
  if (hex.size() != 32) {
    throw EncodingError("compliance id hex must be 32 characters");
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  ComplianceId id;
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw EncodingError("compliance id hex contains a non-canonical character");
    }
    id.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return id;
}

ComplianceId generate_compliance_id(Rng& rng) {
  ComplianceId id;
  for (int half = 0; half < 2; ++half) {
    const std::uint64_t word = rng.next_u64();
    for (int i = 0; i < 8; ++i) {
      id.bytes[half * 8 + i] = static_cast<std::uint8_t>(word >> (56 - 8 * i));
    }
  }
  return id;
}

Digest compute_block_hash(const Block& b) {
  std::string preimage;
  preimage += std::to_string(b.height);
  preimage += kFieldSep;
  preimage += b.prev_hash.hex();
  preimage += kFieldSep;
  preimage += b.proposer_id;
  for (const auto& e : b.entries) {
    preimage += kRecordSep;
    preimage += entry_preimage(e);
  }
  return sha256(preimage);
}

nlohmann::json block_to_json(const Block& b) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : b.entries) {
    entries.push_back({{"id", e.id.hex()},
                       {"digest", e.digest.hex()},
                       {"bit", e.compliance_bit},
                       {"imo", e.vessel_imo},
                       {"timestamp", e.timestamp}});
  }
  nlohmann::json approvals = nlohmann::json::array();
  for (const auto& a : b.approvals) {
    approvals.push_back({a.validator_id, a.stake});
  }
  return {{"height", b.height},
          {"prev_hash", b.prev_hash.hex()},
          {"entries", std::move(entries)},
          {"proposer", b.proposer_id},
          {"approvals", std::move(approvals)},
          {"block_hash", b.block_hash.hex()}};
}

Block block_from_json(const nlohmann::json& j) {
  Block b;
  b.height = j.at("height").get<long long>();
  b.prev_hash = Digest::from_hex(j.at("prev_hash").get<std::string>());
  b.proposer_id = j.at("proposer").get<std::string>();
  b.block_hash = Digest::from_hex(j.at("block_hash").get<std::string>());
  for (const auto& e : j.at("entries")) {
    LedgerEntry entry;
    entry.id = ComplianceId::from_hex(e.at("id").get<std::string>());
    entry.digest = Digest::from_hex(e.at("digest").get<std::string>());
    entry.compliance_bit = e.at("bit").get<int>();
    entry.vessel_imo = e.at("imo").get<long long>();
    entry.timestamp = e.at("timestamp").get<long long>();
    b.entries.push_back(std::move(entry));
  }
  for (const auto& a : j.at("approvals")) {
    if (!a.is_array() || a.size() != 2) {
      throw EncodingError("approval must be a [validator_id, stake] pair");
    }
    b.approvals.push_back({a[0].get<std::string>(), a[1].get<double>()});
  }
  return b;
}

Digest compute_record_digest(const Block& b) { return sha256(block_to_json(b).dump()); }

Chain Chain::genesis() {
  Chain chain;
  Block g;
  g.height = 0;
  g.prev_hash = Digest::zero();
  g.block_hash = compute_block_hash(g);
  g.record_digest = compute_record_digest(g);
  chain.blocks_.push_back(std::move(g));
  return chain;
}

Chain Chain::from_blocks(std::vector<Block> blocks) {
  Chain chain;
  chain.blocks_ = std::move(blocks);
  for (const auto& b : chain.blocks_) {
    for (const auto& e : b.entries) {
      chain.ids_.insert(e.id);
    }
  }
  return chain;
}

std::size_t Chain::entry_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.entries.size();
  return n;
}

// Grants append_block access to the private containers.
class ChainMutator {
public:
  static void push(Chain& chain, Block block) {
    for (const auto& e : block.entries) {
      chain.ids_.insert(e.id);
    }
    chain.blocks_.push_back(std::move(block));
  }
};

std::string_view append_result_name(AppendResult r) {
  switch (r) {
    case AppendResult::Appended: return "appended";
    case AppendResult::NotApproved: return "not_approved";
    case AppendResult::EmptyBlock: return "empty_block";
    case AppendResult::BadLink: return "bad_link";
    case AppendResult::BadHash: return "bad_hash";
    case AppendResult::BadEntry: return "bad_entry";
    case AppendResult::DuplicateId: return "duplicate_id";
  }
  return "unknown";
}

Block assemble_block(std::vector<LedgerEntry> pending, std::string proposer_id,
                     const Chain& chain) {
  if (pending.empty()) {
    throw std::invalid_argument("cannot assemble a block from an empty batch");
  }
  Block b;
  b.height = chain.next_height();
  b.prev_hash = chain.tip().block_hash;
  b.entries = std::move(pending);
  b.proposer_id = std::move(proposer_id);
  b.block_hash = compute_block_hash(b);
  return b;
}

AppendResult append_block(Chain& chain, Block candidate, std::vector<Approval> approvals,
                          bool approved) {
  if (!approved) return AppendResult::NotApproved;
  if (candidate.entries.empty()) return AppendResult::EmptyBlock;
  if (candidate.height != chain.next_height() ||
      candidate.prev_hash != chain.tip().block_hash) {
    return AppendResult::BadLink;
  }
  if (compute_block_hash(candidate) != candidate.block_hash) return AppendResult::BadHash;
  std::set<ComplianceId> seen;
  for (const auto& e : candidate.entries) {
    if (!entry_fields_valid(e)) return AppendResult::BadEntry;
    if (!seen.insert(e.id).second || chain.contains_id(e.id)) {
      return AppendResult::DuplicateId;
    }
  }
  candidate.approvals = std::move(approvals);
  candidate.record_digest = compute_record_digest(candidate);
  ChainMutator::push(chain, std::move(candidate));
  return AppendResult::Appended;
}

std::optional<long long> verify_chain(const Chain& chain) {
  const auto& blocks = chain.blocks();
  if (blocks.empty()) return 0;
  std::set<ComplianceId> seen;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto h = static_cast<long long>(i);
    const Block& b = blocks[i];
    if (b.height != h) return h;
    if (i == 0) {
      if (b.prev_hash != Digest::zero() || !b.entries.empty() || !b.proposer_id.empty()) {
        return h;
      }
    } else {
      if (b.prev_hash != blocks[i - 1].block_hash) return h;
      if (b.entries.empty()) return h;
    }
    if (compute_block_hash(b) != b.block_hash) return h;
    if (compute_record_digest(b) != b.record_digest) return h;
    for (const auto& e : b.entries) {
      if (!entry_fields_valid(e)) return h;
      if (!seen.insert(e.id).second) return h;
    }
  }
  return std::nullopt;
}

namespace {

std::string render_line(const Block& b) {
  std::string line;
  line += kLinePrefix;
  line += block_to_json(b).dump();
  line += kLineMid;
  line += b.record_digest.hex();
  line += kLineSuffix;
  return line;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw LedgerIoError("cannot open ledger file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  if (lines.empty()) {
    throw LedgerIoError("ledger file is empty: " + path);
  }
  return lines;
}

struct ParsedLine {
  Block block;
  std::string stored_digest_hex;
  std::string raw_block_bytes;
};

ParsedLine parse_line(const std::string& line, long long line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw LedgerIoError(std::string("unparseable ledger record: ") + e.what(), line_no);
  }
  ParsedLine out;
  try {
    if (!j.is_object() || !j.contains("block") || !j.contains("record_digest")) {
      throw EncodingError("record must carry 'block' and 'record_digest'");
    }
    out.block = block_from_json(j.at("block"));
    out.stored_digest_hex = j.at("record_digest").get<std::string>();
    out.block.record_digest = Digest::from_hex(out.stored_digest_hex);
  } catch (const std::exception& e) {
    throw LedgerIoError(std::string("invalid ledger record: ") + e.what(), line_no);
  }
  // Raw bytes of the block object, exactly as stored.
  if (line.rfind(kLinePrefix, 0) == 0 && line.size() > kLinePrefix.size() + kLineMid.size() +
                                                          64 + kLineSuffix.size()) {
    const std::size_t tail = kLineMid.size() + 64 + kLineSuffix.size();
    const std::string_view expected_tail(line.data() + line.size() - tail, tail);
    if (expected_tail.substr(0, kLineMid.size()) == kLineMid &&
        expected_tail.substr(kLineMid.size() + 64) == kLineSuffix) {
      out.raw_block_bytes = line.substr(kLinePrefix.size(),
                                        line.size() - kLinePrefix.size() - tail);
    }
  }
  if (out.raw_block_bytes.empty()) {
    throw LedgerIoError("ledger record does not follow the canonical layout", line_no);
  }
  return out;
}

}  // namespace

void persist(const Chain& chain, const std::string& path) {
  std::size_t existing = 0;
  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::string line;
      std::string last_line;
      while (std::getline(in, line)) {
        if (!line.empty()) {
          last_line = line;
          ++existing;
        }
      }
      if (existing > chain.blocks().size()) {
        throw LedgerIoError("ledger file already has more blocks than the chain");
      }
      if (existing > 0) {
        const ParsedLine parsed = parse_line(last_line, static_cast<long long>(existing));
        const Block& expected = chain.blocks()[existing - 1];
        if (parsed.block.height != expected.height ||
            parsed.block.block_hash != expected.block_hash) {
          throw LedgerIoError("ledger file diverges from the chain; refusing to append");
        }
      }
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw LedgerIoError("cannot open ledger file for writing: " + path);
  }
  for (std::size_t i = existing; i < chain.blocks().size(); ++i) {
    out << render_line(chain.blocks()[i]) << '\n';
  }
  out.flush();
  if (!out) {
    throw LedgerIoError("failed writing ledger file: " + path);
  }
}

Chain load_ledger(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<Block> blocks;
  blocks.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    blocks.push_back(parse_line(lines[i], static_cast<long long>(i + 1)).block);
  }
  return Chain::from_blocks(std::move(blocks));
}

std::optional<long long> verify_ledger_file(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<Block> blocks;
  blocks.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto height = static_cast<long long>(i);
    ParsedLine parsed;
    try {
      parsed = parse_line(lines[i], static_cast<long long>(i + 1));
    } catch (const LedgerIoError&) {
      if (i + 1 == lines.size()) {
        throw;  // unparseable final record: indistinguishable from truncation
      }
      return height;
    }
    // The stored digest must match the bytes exactly as they sit in the file.
    if (sha256(parsed.raw_block_bytes).hex() != parsed.stored_digest_hex) {
      return height;
    }
    blocks.push_back(std::move(parsed.block));
  }
  return verify_chain(Chain::from_blocks(std::move(blocks)));
}

}  // namespace marichain
