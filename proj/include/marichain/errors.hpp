#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace marichain {

/// A field cannot be rendered canonically (reserved byte, non-finite number, ...).
class EncodingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario/atlas/schedule input. Carries every violation found, not
/// just the first, so a caller can report them all at once.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "configuration invalid:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Caller's role is not permitted to perform the operation.
class PermissionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operation conflicts with current state (double deployment, duplicate IMO, ...).
class StateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Lookup of a key that does not exist (vessel, regulation, gas op, ...).
class NotFoundError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Ledger file cannot be read or a record cannot be parsed.
/// `line` is 1-based; 0 means the failure is not tied to a specific line.
class LedgerIoError : public std::runtime_error {
public:
  LedgerIoError(const std::string& msg, long long line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}

  long long line() const { return line_; }

private:
  long long line_;
};

}  // namespace marichain
