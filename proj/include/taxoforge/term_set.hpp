#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taxoforge {

using TermIndex = std::size_t;

/// The vocabulary of one induction problem. Terms are stored canonicalized
/// and unique; the order is significant (it fixes matrix row/column order).
class TermSet {
 public:
  TermSet() = default;

  /// Canonicalizes every term. Throws ValidationError on an empty set, an
  /// empty term, or a duplicate after canonicalization.
  TermSet(std::string id, const std::vector<std::string>& terms);

  const std::string& id() const noexcept { return id_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::string& operator[](TermIndex i) const { return terms_.at(i); }

  std::optional<TermIndex> index_of(std::string_view term) const;

  /// Same terms in any order.
  bool same_terms(const TermSet& other) const;

  friend bool operator==(const TermSet&, const TermSet&) = default;

 private:
  std::string id_;
  std::vector<std::string> terms_;
  std::vector<TermIndex> sorted_;  // indices ordered by term, for lookup
};

}  // namespace taxoforge
