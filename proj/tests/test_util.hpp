#pragma once

#include <Eigen/Core>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "taxoforge/score_matrix.hpp"
#include "taxoforge/taxonomy.hpp"

namespace taxoforge::testing {

/// Matrix over the given terms with all off-diagonal entries `fill`,
/// then the listed (parent, child, score) overrides.
struct EdgeScore {
  std::string parent;
  std::string child;
  double score;
};

inline EdgeScoreMatrix matrix_of(const std::vector<std::string>& terms,
                                 std::initializer_list<EdgeScore> edges, double fill = 0.0,
                                 const std::string& id = "t") {
  TermSet ts(id, terms);
  const auto n = static_cast<Eigen::Index>(terms.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(n, n, fill);
  for (const auto& e : edges) {
    s(static_cast<Eigen::Index>(*ts.index_of(e.parent)),
      static_cast<Eigen::Index>(*ts.index_of(e.child))) = e.score;
  }
  return EdgeScoreMatrix(ts, s);
}

inline Taxonomy tree_of(const std::vector<std::string>& terms, const std::string& root,
                        const std::vector<std::pair<std::string, std::string>>& edges,
                        const std::string& id = "t") {
  TermSet ts(id, terms);
  std::vector<Edge> e;
  for (const auto& [p, c] : edges) e.emplace_back(*ts.index_of(p), *ts.index_of(c));
  const TermIndex r = *ts.index_of(root);
  return Taxonomy::from_edges(std::move(ts), r, e);
}

inline std::vector<std::string> letters(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(std::string(1, static_cast<char>('a' + k)));
  return out;
}

inline EdgeScoreMatrix uniform_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd s(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) s(i, j) = u(rng);
  }
  return EdgeScoreMatrix(TermSet("r", letters(n)), s);
}

/// Scores on the grid k/16 with |k| <= 64, so sums and shifts by small
/// dyadic constants are exact in binary floating point.
inline EdgeScoreMatrix dyadic_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(-64, 64);
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd s(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) s(i, j) = k(rng) / 16.0;
  }
  return EdgeScoreMatrix(TermSet("d", letters(n)), s);
}

/// Uniformly random labelled tree on n nodes (random parent among earlier
/// nodes of a random permutation).
inline Taxonomy random_tree(std::size_t n, std::mt19937_64& rng, const std::string& id = "rt") {
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < n; ++k) perm[k] = k;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<TermIndex> parent(n, Taxonomy::kNoParent);
  for (std::size_t k = 1; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    parent[perm[k]] = perm[pick(rng)];
  }
  return Taxonomy(TermSet(id, letters(n)), perm[0], parent);
}

}  // namespace taxoforge::testing
