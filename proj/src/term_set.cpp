#include "taxoforge/term_set.hpp"

#include <algorithm>
#include <numeric>

#include "taxoforge/error.hpp"
#include "taxoforge/text.hpp"

namespace taxoforge {

TermSet::TermSet(std::string id, const std::vector<std::string>& terms)
    : id_(std::move(id)) {
  if (terms.empty()) throw ValidationError("empty term set", id_);
  terms_.reserve(terms.size());
  for (const auto& t : terms) {
    std::string c = canonicalize_term(t);
    if (c.empty()) throw ValidationError("empty term", id_);
    terms_.push_back(std::move(c));
  }
  sorted_.resize(terms_.size());
  std::iota(sorted_.begin(), sorted_.end(), TermIndex{0});
  std::sort(sorted_.begin(), sorted_.end(),
            [&](TermIndex a, TermIndex b) { return terms_[a] < terms_[b]; });
  for (std::size_t k = 1; k < sorted_.size(); ++k) {
    if (terms_[sorted_[k - 1]] == terms_[sorted_[k]]) {
      throw ValidationError("duplicate term", id_ + ": '" + terms_[sorted_[k]] + "'");
    }
  }
}

std::optional<TermIndex> TermSet::index_of(std::string_view term) const {
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), term,
                             [&](TermIndex a, std::string_view t) { return terms_[a] < t; });
  if (it != sorted_.end() && terms_[*it] == term) return *it;
  return std::nullopt;
}

bool TermSet::same_terms(const TermSet& other) const {
  if (size() != other.size()) return false;
  for (std::size_t k = 0; k < sorted_.size(); ++k) {
    if (terms_[sorted_[k]] != other.terms_[other.sorted_[k]]) return false;
  }
  return true;
}

}  // namespace taxoforge
