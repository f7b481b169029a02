#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "taxoforge/term_set.hpp"

namespace taxoforge {

/// Pairwise parenthood scores over a TermSet. `scores(i, j)` is the log-odds
/// that term i is the parent of term j. The diagonal holds the absent marker
/// (-infinity in memory, null on disk) and is never read as a score.
class EdgeScoreMatrix {
 public:
  static constexpr double kAbsent = -std::numeric_limits<double>::infinity();

  EdgeScoreMatrix() = default;

  /// Validates shape and finiteness; overwrites the diagonal with kAbsent.
  EdgeScoreMatrix(TermSet terms, Eigen::MatrixXd scores);

  const TermSet& terms() const noexcept { return terms_; }
  const std::string& tree_id() const noexcept { return terms_.id(); }
  const Eigen::MatrixXd& scores() const noexcept { return scores_; }
  std::size_t size() const noexcept { return terms_.size(); }
  double operator()(TermIndex parent, TermIndex child) const { return scores_(parent, child); }

  /// Bitwise equality of terms and off-diagonal scores.
  friend bool operator==(const EdgeScoreMatrix& a, const EdgeScoreMatrix& b);

 private:
  TermSet terms_;
  Eigen::MatrixXd scores_;
};

/// Score-matrix file codec: {"tree_id", "terms", "scores"} with a null
/// diagonal. Output is a single line terminated by '\n'.
std::string to_json_text(const EdgeScoreMatrix& m);
EdgeScoreMatrix score_matrix_from_json_text(std::string_view text);

void write_score_matrix(const EdgeScoreMatrix& m, const std::filesystem::path& path);

/// Reads and validates a score-matrix file. If `expected` is given the
/// file's terms must equal it (same canonical terms, same order).
EdgeScoreMatrix load_external_matrix(const std::filesystem::path& path,
                                     const std::optional<TermSet>& expected = std::nullopt);

}  // namespace taxoforge
