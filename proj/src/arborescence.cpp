#include "taxoforge/arborescence.hpp"

namespace taxoforge {

namespace {

Taxonomy to_taxonomy(const EdgeScoreMatrix& matrix, TermIndex root,
                     const std::vector<Eigen::Index>& parent) {
  std::vector<TermIndex> p(parent.size(), Taxonomy::kNoParent);
  for (std::size_t j = 0; j < parent.size(); ++j) {
    if (parent[j] >= 0) p[j] = static_cast<TermIndex>(parent[j]);
  }
  return Taxonomy(matrix.terms(), root, std::move(p));
}

void check_root(const EdgeScoreMatrix& matrix, TermIndex root) {
  if (matrix.size() == 0) throw InvalidArgument("empty score matrix");
  if (root >= matrix.size()) throw InvalidArgument("root index out of range");
}

}  // namespace

Taxonomy chu_liu_edmonds(const EdgeScoreMatrix& matrix, TermIndex root) {
  check_root(matrix, root);
  return to_taxonomy(matrix, root,
                     max_spanning_arborescence(matrix.scores(), static_cast<Eigen::Index>(root)));
}

Taxonomy brute_force_arborescence(const EdgeScoreMatrix& matrix, TermIndex root) {
  check_root(matrix, root);
  return to_taxonomy(
      matrix, root, brute_force_max_arborescence(matrix.scores(), static_cast<Eigen::Index>(root)));
}

double total_score(const Taxonomy& tree, const EdgeScoreMatrix& matrix) {
  if (tree.terms().terms() != matrix.terms().terms()) {
    throw ValidationError("term mismatch", "tree '" + tree.id() + "' vs matrix '" +
                                               matrix.tree_id() + "'");
  }
  double total = 0.0;
  for (TermIndex j = 0; j < tree.size(); ++j) {
    if (j != tree.root()) total += matrix(tree.parent(j), j);
  }
  return total;
}

}  // namespace taxoforge
