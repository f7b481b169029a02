#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  friend bool operator==(const PRF&, const PRF&) = default;
};

/// 2PR/(P+R), or 0 when P+R is 0.
double f1_score(double precision, double recall);

/// Ancestor precision/recall/F1 over transitive-closure pair sets. The two
/// trees must cover the same canonical terms (order may differ). Empty
/// predicted set gives P=0; empty gold set gives R=1 only if the predicted
/// set is empty too.
PRF ancestor_prf(const Taxonomy& predicted, const Taxonomy& gold);

struct TreeScore {
  std::string id;
  PRF prf;
  friend bool operator==(const TreeScore&, const TreeScore&) = default;
};

struct EvalReport {
  std::vector<TreeScore> per_tree;
  PRF macro;  // per-tree means; macro.f1 is NOT the harmonic mean of macro P and R
  std::size_t n_trees = 0;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Per-tree scores plus their arithmetic means. Tree ids come from `gold`.
EvalReport evaluate_set(const std::vector<std::pair<Taxonomy, Taxonomy>>& predicted_gold);

/// Macro mean of already computed per-tree scores.
EvalReport summarize(std::vector<TreeScore> per_tree);

/// Harmonic mean of the report's macro P and macro R, for comparison with
/// the per-tree-averaged macro F1.
double harmonic_macro_f1(const EvalReport& report);

/// Element-wise mean over restarts. Every report must cover the same tree
/// ids; the first report's order is kept.
EvalReport aggregate_restarts(const std::vector<EvalReport>& reports);

/// Report JSON: {"macro": {"P","R","F1"}, "n_trees", "per_tree": [{"id","P","R","F1"}]}
/// with metrics rounded half-even to 6 decimals. Ends with '\n'.
std::string report_to_json_text(const EvalReport& report);
EvalReport report_from_json_text(std::string_view text);

}  // namespace taxoforge
