#include "taxoforge/induce.hpp"

#include <cmath>

#include "taxoforge/arborescence.hpp"
#include "taxoforge/error.hpp"

namespace taxoforge {

namespace {

Taxonomy induce_best(const EdgeScoreMatrix& matrix) {
  Taxonomy best = chu_liu_edmonds(matrix, 0);
  double best_total = total_score(best, matrix);
  for (TermIndex r = 1; r < matrix.size(); ++r) {
    Taxonomy candidate = chu_liu_edmonds(matrix, r);
    const double total = total_score(candidate, matrix);
    if (total > best_total) {
      best_total = total;
      best = std::move(candidate);
    }
  }
  return best;
}

Taxonomy induce_virtual(const EdgeScoreMatrix& matrix, const VirtualRoot& policy) {
  if (!std::isfinite(policy.prior)) throw InvalidArgument("virtual-root prior must be finite");
  const auto n = static_cast<Eigen::Index>(matrix.size());
  // Phantom is the last index so real parents win ties against it.
  Eigen::MatrixXd augmented(n + 1, n + 1);
  augmented.topLeftCorner(n, n) = matrix.scores();
  augmented.row(n).setConstant(policy.prior);
  augmented.col(n).setZero();  // edges into the phantom root are never read
  augmented.diagonal().setZero();

  const std::vector<Eigen::Index> parent = max_spanning_arborescence(augmented, n);

  std::vector<TermIndex> phantom_children;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (parent[static_cast<std::size_t>(j)] == n) phantom_children.push_back(static_cast<TermIndex>(j));
  }
  if (phantom_children.size() > 1 && policy.strict) {
    throw ValidationError("multiple virtual-root children",
                          matrix.tree_id() + ": " + std::to_string(phantom_children.size()) +
                              " nodes attached to the virtual root");
  }
  // All phantom edges share the prior, so the tie-break picks the first.
  const TermIndex root = phantom_children.front();
  std::vector<TermIndex> p(matrix.size(), Taxonomy::kNoParent);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto jj = static_cast<TermIndex>(j);
    if (jj == root) continue;
    const Eigen::Index pj = parent[static_cast<std::size_t>(j)];
    p[jj] = (pj == n) ? root : static_cast<TermIndex>(pj);
  }
  return Taxonomy(matrix.terms(), root, std::move(p));
}

}  // namespace

Taxonomy induce(const EdgeScoreMatrix& matrix, const RootPolicy& policy) {
  if (matrix.size() == 0) throw InvalidArgument("empty score matrix");
  return std::visit(
      [&](const auto& pol) -> Taxonomy {
        using P = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<P, GivenRoot>) {
          if (pol.root >= matrix.size()) throw InvalidArgument("given root out of range");
          return chu_liu_edmonds(matrix, pol.root);
        } else if constexpr (std::is_same_v<P, BestOfAllRoots>) {
          return induce_best(matrix);
        } else {
          return induce_virtual(matrix, pol);
        }
      },
      policy);
}

}  // namespace taxoforge
