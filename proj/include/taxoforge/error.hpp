#pragma once

#include <stdexcept>
#include <string>

namespace taxoforge {

/// Input that violates a documented rule (file format, tree invariant, etc.).
/// `rule()` is a short stable name such as "not an arborescence" so callers
/// and tests can match on it without parsing the message.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string rule, const std::string& detail)
      : std::runtime_error(detail.empty() ? rule : rule + ": " + detail),
        rule_(std::move(rule)) {}

  const std::string& rule() const noexcept { return rule_; }

  /// Same rule, message prefixed with a location such as "file.jsonl:12".
  static ValidationError at(const std::string& where, const ValidationError& e) {
    return ValidationError(e.rule_, where + ": " + e.what(), Raw{});
  }

 private:
  struct Raw {};
  ValidationError(std::string rule, const std::string& message, Raw)
      : std::runtime_error(message), rule_(std::move(rule)) {}

  std::string rule_;
};

/// Bad argument to an operation (as opposed to bad data read from a file).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace taxoforge
