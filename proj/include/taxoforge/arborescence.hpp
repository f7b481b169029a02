#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <vector>

#include "taxoforge/error.hpp"
#include "taxoforge/score_matrix.hpp"
#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

namespace detail {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Best incoming edge per node; ties go to the smaller parent index.
// Entries equal to -inf are never chosen over a finite one.
template <typename Scalar>
std::vector<Eigen::Index> best_incoming(const DenseMatrix<Scalar>& w, Eigen::Index root) {
  const Eigen::Index n = w.rows();
  std::vector<Eigen::Index> best(static_cast<std::size_t>(n), -1);
  for (Eigen::Index v = 0; v < n; ++v) {
    if (v == root) continue;
    Eigen::Index arg = -1;
    for (Eigen::Index u = 0; u < n; ++u) {
      if (u == v) continue;
      if (arg < 0 || w(u, v) > w(arg, v)) arg = u;
    }
    best[static_cast<std::size_t>(v)] = arg;
  }
  return best;
}

// First cycle (scanning start nodes in index order) in the functional graph
// `best`; empty if acyclic.
inline std::vector<Eigen::Index> find_cycle(const std::vector<Eigen::Index>& best,
                                            Eigen::Index root) {
  const std::size_t n = best.size();
  std::vector<int> mark(n, -1);
  for (std::size_t start = 0; start < n; ++start) {
    if (static_cast<Eigen::Index>(start) == root || mark[start] != -1) continue;
    Eigen::Index u = static_cast<Eigen::Index>(start);
    while (u != root && mark[static_cast<std::size_t>(u)] == -1) {
      mark[static_cast<std::size_t>(u)] = static_cast<int>(start);
      u = best[static_cast<std::size_t>(u)];
    }
    if (u != root && mark[static_cast<std::size_t>(u)] == static_cast<int>(start)) {
      std::vector<Eigen::Index> cycle{u};
      for (Eigen::Index x = best[static_cast<std::size_t>(u)]; x != u;
           x = best[static_cast<std::size_t>(x)]) {
        cycle.push_back(x);
      }
      return cycle;
    }
  }
  return {};
}

// Recursive contraction. Returns parent indices (root maps to -1).
template <typename Scalar>
std::vector<Eigen::Index> solve_arborescence(const DenseMatrix<Scalar>& w, Eigen::Index root) {
  const Eigen::Index n = w.rows();
  std::vector<Eigen::Index> best = best_incoming(w, root);
  best[static_cast<std::size_t>(root)] = -1;
  const std::vector<Eigen::Index> cycle = find_cycle(best, root);
  if (cycle.empty()) return best;

  std::vector<char> in_cycle(static_cast<std::size_t>(n), 0);
  for (auto v : cycle) in_cycle[static_cast<std::size_t>(v)] = 1;

  // Nodes outside the cycle keep their relative order; the cycle becomes
  // the last node of the contracted graph.
  std::vector<Eigen::Index> to_new(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> to_old;
  for (Eigen::Index v = 0; v < n; ++v) {
    if (!in_cycle[static_cast<std::size_t>(v)]) {
      to_new[static_cast<std::size_t>(v)] = static_cast<Eigen::Index>(to_old.size());
      to_old.push_back(v);
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(to_old.size()) + 1;
  const Eigen::Index c = m - 1;
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

  DenseMatrix<Scalar> contracted = DenseMatrix<Scalar>::Constant(m, m, kNegInf);
  std::vector<Eigen::Index> enter_at(static_cast<std::size_t>(m), -1);  // cycle node entered from u
  std::vector<Eigen::Index> leave_from(static_cast<std::size_t>(m), -1);  // cycle node leading to v

  for (Eigen::Index a = 0; a < c; ++a) {
    const Eigen::Index u = to_old[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < c; ++b) {
      if (a != b) contracted(a, b) = w(u, to_old[static_cast<std::size_t>(b)]);
    }
    // Edge into the cycle: entering v replaces v's cycle edge.
    Eigen::Index arg = -1;
    Scalar best_gain = kNegInf;
    for (Eigen::Index v = 0; v < n; ++v) {
      if (!in_cycle[static_cast<std::size_t>(v)]) continue;
      const Scalar gain = w(u, v) - w(best[static_cast<std::size_t>(v)], v);
      if (arg < 0 || gain > best_gain) {
        arg = v;
        best_gain = gain;
      }
    }
    contracted(a, c) = best_gain;
    enter_at[static_cast<std::size_t>(a)] = arg;

    // Edge out of the cycle.
    Eigen::Index src = -1;
    Scalar best_out = kNegInf;
    for (Eigen::Index v = 0; v < n; ++v) {
      if (!in_cycle[static_cast<std::size_t>(v)]) continue;
      if (src < 0 || w(v, u) > best_out) {
        src = v;
        best_out = w(v, u);
      }
    }
    contracted(c, a) = best_out;
    leave_from[static_cast<std::size_t>(a)] = src;
  }

  const std::vector<Eigen::Index> sub =
      solve_arborescence<Scalar>(contracted, to_new[static_cast<std::size_t>(root)]);

  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n), -1);
  for (auto v : cycle) parent[static_cast<std::size_t>(v)] = best[static_cast<std::size_t>(v)];
  for (Eigen::Index a = 0; a < c; ++a) {
    const Eigen::Index v = to_old[static_cast<std::size_t>(a)];
    const Eigen::Index p = sub[static_cast<std::size_t>(a)];
    if (p < 0) continue;
    parent[static_cast<std::size_t>(v)] =
        (p == c) ? leave_from[static_cast<std::size_t>(a)] : to_old[static_cast<std::size_t>(p)];
  }
  const Eigen::Index entry_src = sub[static_cast<std::size_t>(c)];
  const Eigen::Index entered = enter_at[static_cast<std::size_t>(entry_src)];
  parent[static_cast<std::size_t>(entered)] = to_old[static_cast<std::size_t>(entry_src)];
  return parent;
}

template <typename Derived>
void check_scores(const Eigen::MatrixBase<Derived>& scores, Eigen::Index root) {
  if (scores.rows() != scores.cols()) {
    throw ValidationError("dimension mismatch", "score matrix is not square");
  }
  if (scores.rows() == 0) throw InvalidArgument("empty score matrix");
  if (root < 0 || root >= scores.rows()) throw InvalidArgument("root index out of range");
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      if (i != j && !std::isfinite(scores(i, j))) {
        throw ValidationError("non-finite score",
                              "entry [" + std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
  }
}

}  // namespace detail

/// Maximum spanning arborescence of a dense score matrix (scores(i, j) is
/// the weight of edge i -> j), rooted at `root`. The diagonal is ignored.
/// Returns the parent of every node, with -1 at the root.
///
/// Equal-score incoming edges resolve to the smaller parent index, and
/// cycles are contracted in index order, so the result is deterministic.
template <typename Derived>
std::vector<Eigen::Index> max_spanning_arborescence(const Eigen::MatrixBase<Derived>& scores,
                                                    Eigen::Index root) {
  using Scalar = typename Derived::Scalar;
  detail::check_scores(scores, root);
  detail::DenseMatrix<Scalar> w = scores;
  w.diagonal().setConstant(-std::numeric_limits<Scalar>::infinity());
  return detail::solve_arborescence<Scalar>(w, root);
}

/// Sum of scores(parent[j], j) over non-root j, accumulated in index order.
template <typename Derived>
typename Derived::Scalar arborescence_score(const Eigen::MatrixBase<Derived>& scores,
                                            const std::vector<Eigen::Index>& parent) {
  typename Derived::Scalar total(0);
  for (std::size_t j = 0; j < parent.size(); ++j) {
    if (parent[j] >= 0) total += scores(parent[j], static_cast<Eigen::Index>(j));
  }
  return total;
}

/// Largest matrix the brute-force search accepts.
inline constexpr std::size_t kBruteForceLimit = 8;

/// Exhaustive search over all parent assignments. Among equal totals the
/// lexicographically smallest parent vector wins.
template <typename Derived>
std::vector<Eigen::Index> brute_force_max_arborescence(const Eigen::MatrixBase<Derived>& scores,
                                                       Eigen::Index root) {
  using Scalar = typename Derived::Scalar;
  detail::check_scores(scores, root);
  const Eigen::Index n = scores.rows();
  if (static_cast<std::size_t>(n) > kBruteForceLimit) {
    throw InvalidArgument("brute force limited to n <= " + std::to_string(kBruteForceLimit));
  }
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n), 0);
  parent[static_cast<std::size_t>(root)] = -1;
  std::vector<Eigen::Index> best_parent;
  Scalar best_total = -std::numeric_limits<Scalar>::infinity();

  auto is_tree = [&] {
    for (Eigen::Index v = 0; v < n; ++v) {
      Eigen::Index u = v;
      for (Eigen::Index steps = 0; u != root; ++steps) {
        if (steps > n) return false;
        u = parent[static_cast<std::size_t>(u)];
      }
    }
    return true;
  };
  auto advance = [&] {
    // Odometer over non-root positions, skipping self-parents.
    for (Eigen::Index v = n - 1; v >= 0; --v) {
      if (v == root) continue;
      auto& p = parent[static_cast<std::size_t>(v)];
      do {
        ++p;
      } while (p == v);
      if (p < n) return true;
      p = (v == 0) ? 1 : 0;
    }
    return false;
  };
  for (Eigen::Index v = 0; v < n; ++v) {
    if (v != root) parent[static_cast<std::size_t>(v)] = (v == 0) ? 1 : 0;
  }
  if (n == 1) return parent;
  do {
    if (!is_tree()) continue;
    const Scalar total = arborescence_score(scores, parent);
    if (best_parent.empty() || total > best_total) {
      best_total = total;
      best_parent = parent;
    }
  } while (advance());
  return best_parent;
}

// EdgeScoreMatrix / Taxonomy level operations.

Taxonomy chu_liu_edmonds(const EdgeScoreMatrix& matrix, TermIndex root);
Taxonomy brute_force_arborescence(const EdgeScoreMatrix& matrix, TermIndex root);

/// Sum of matrix(parent(j), j) over non-root j. Throws ValidationError
/// ("term mismatch") if the tree and matrix disagree on term order.
double total_score(const Taxonomy& tree, const EdgeScoreMatrix& matrix);

}  // namespace taxoforge
