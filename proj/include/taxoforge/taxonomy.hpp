#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taxoforge/term_set.hpp"

namespace taxoforge {

using Edge = std::pair<TermIndex, TermIndex>;  // (parent, child)

/// A rooted hypernym tree over a TermSet. Construction validates that the
/// parent vector describes an arborescence; instances are always valid.
class Taxonomy {
 public:
  static constexpr TermIndex kNoParent = std::numeric_limits<TermIndex>::max();

  Taxonomy() = default;

  /// `parent[root]` must be kNoParent; every other entry names a term.
  Taxonomy(TermSet terms, TermIndex root, std::vector<TermIndex> parent);

  /// Builds from (parent, child) edges; a child with two parents, an
  /// out-of-range index or a missing parent are all rejected.
  static Taxonomy from_edges(TermSet terms, TermIndex root, const std::vector<Edge>& edges);

  const TermSet& terms() const noexcept { return terms_; }
  const std::string& id() const noexcept { return terms_.id(); }
  std::size_t size() const noexcept { return terms_.size(); }
  TermIndex root() const noexcept { return root_; }
  TermIndex parent(TermIndex child) const { return parent_.at(child); }
  const std::vector<TermIndex>& parents() const noexcept { return parent_; }

  /// Edges ordered by child index.
  std::vector<Edge> edges() const;
  std::vector<std::vector<TermIndex>> children() const;

  /// Edge count from the root to each node.
  std::vector<std::size_t> depths() const;
  std::size_t max_depth() const;

  friend bool operator==(const Taxonomy&, const Taxonomy&) = default;

 private:
  TermSet terms_;
  TermIndex root_ = 0;
  std::vector<TermIndex> parent_;
};

/// Throws ValidationError("not an arborescence") unless `parent` is a tree
/// rooted at `root` that reaches every node.
void validate_arborescence(const std::vector<TermIndex>& parent, TermIndex root);

/// Transitive closure of the parent relation, reflexive pairs excluded.
/// Pairs are (ancestor, descendant) indices into the tree's TermSet.
struct AncestorSet {
  std::vector<Edge> pairs;  // sorted, unique

  std::size_t size() const noexcept { return pairs.size(); }
  bool contains(TermIndex ancestor, TermIndex descendant) const;
  friend bool operator==(const AncestorSet&, const AncestorSet&) = default;
};

AncestorSet ancestor_pairs(const Taxonomy& tree);

/// Taxonomy record codec: {"id", "terms", "root", "edges": [[parent, child]...]}.
/// Output is one line without a trailing newline.
std::string to_json_text(const Taxonomy& tree);
Taxonomy taxonomy_from_json_text(std::string_view text);

}  // namespace taxoforge
