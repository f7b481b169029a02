#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "taxoforge/definitions.hpp"
#include "taxoforge/features.hpp"
#include "taxoforge/score_matrix.hpp"
#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

inline constexpr std::string_view kDefaultHypothesisTemplate = "A {child} is a {parent}.";

/// Substitutes canonicalized terms into `tmpl`, which must contain both
/// "{child}" and "{parent}".
std::string make_hypothesis(std::string_view parent, std::string_view child,
                            std::string_view tmpl = kDefaultHypothesisTemplate);

/// Gold edges score `margin`, everything else 0, plus N(0, noise_sigma^2)
/// noise on every off-diagonal entry drawn row-major from `seed`.
EdgeScoreMatrix oracle_scores(const Taxonomy& gold, double margin, double noise_sigma,
                              std::uint64_t seed);

/// I.i.d. uniform(0, 1) scores; decoding them gives the random-tree baseline.
EdgeScoreMatrix random_scores(const TermSet& terms, std::uint64_t seed);

/// Re-ranked definitions for each tree, keyed by tree id.
using RankedDefinitions = std::unordered_map<std::string, DefinitionStore>;

RankedDefinitions rank_for_trees(const std::vector<Taxonomy>& trees, const DefinitionStore& store,
                                 const EmbeddingTable& embeddings, const StopwordSet& stopwords);

struct PairExample {
  std::string tree_id;
  std::string parent;
  std::string child;
  int label = 0;
  std::string parent_context;
  std::string child_context;

  friend bool operator==(const PairExample&, const PairExample&) = default;
};

struct AllNegatives {};
struct SampledNegatives {
  std::size_t ratio = 1;  // negatives per positive, per tree
  std::uint64_t seed = 0;
};
using NegativePolicy = std::variant<AllNegatives, SampledNegatives>;

/// Positives are the gold edges, negatives the other ordered within-tree
/// pairs (all, or `ratio` per positive without replacement). Pairs come out
/// row-major per tree. A term with no definitions gets an empty context.
std::vector<PairExample> generate_training_pairs(const std::vector<Taxonomy>& trees,
                                                 const RankedDefinitions& definitions,
                                                 const NegativePolicy& policy,
                                                 const ContextLimits& limits = {});

/// Pair-export JSONL codec (one record per line, includes the hypothesis).
std::string pair_to_json_text(const PairExample& pair,
                              std::string_view tmpl = kDefaultHypothesisTemplate);

// Logistic regression. Design matrices carry the bias as their last column
// and the bias weight is not regularized.

inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }
inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// mean_k [softplus(x_k.w) - y_k (x_k.w)] + l2/2 * |w without bias|^2
template <typename DX, typename DY, typename DW>
double logistic_loss(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                     const Eigen::MatrixBase<DW>& w, double l2) {
  const Eigen::VectorXd z = x * w;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) sum += softplus(z(k)) - y(k) * z(k);
  const auto head = w.head(w.size() - 1);
  return sum / static_cast<double>(z.size()) + 0.5 * l2 * head.squaredNorm();
}

template <typename DX, typename DY, typename DW>
Eigen::VectorXd logistic_gradient(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                                  const Eigen::MatrixBase<DW>& w, double l2) {
  const Eigen::VectorXd z = x * w;
  Eigen::VectorXd residual(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) residual(k) = sigmoid(z(k)) - y(k);
  Eigen::VectorXd grad = x.transpose() * residual / static_cast<double>(z.size());
  grad.head(w.size() - 1) += l2 * w.head(w.size() - 1);
  return grad;
}

struct TrainingOptions {
  double learning_rate = 0.5;
  int epochs = 500;
  double l2 = 1e-3;
  std::uint64_t seed = 0;
};

struct FeatureScorerModel {
  std::vector<std::string> feature_spec;
  Eigen::VectorXd weights;  // one per feature, then the bias
  TrainingOptions training;
  double final_loss = 0.0;

  double bias() const { return weights(weights.size() - 1); }
  friend bool operator==(const FeatureScorerModel& a, const FeatureScorerModel& b);
};

/// Rows are featurize() outputs with a trailing 1 for the bias.
Eigen::MatrixXd design_matrix(const std::vector<PairExample>& examples,
                              const RankedDefinitions& definitions,
                              const EmbeddingTable& embeddings, const StopwordSet& stopwords);

/// Full-batch gradient descent on the L2-regularized logistic loss.
/// Weights start at N(0, 0.01^2) from `options.seed`. If `loss_trace` is
/// given it receives the loss before training and after every epoch.
FeatureScorerModel train_feature_scorer(const std::vector<PairExample>& examples,
                                        const RankedDefinitions& definitions,
                                        const EmbeddingTable& embeddings,
                                        const StopwordSet& stopwords,
                                        const TrainingOptions& options,
                                        std::vector<double>* loss_trace = nullptr);

/// Same, over a prepared design matrix and 0/1 labels.
FeatureScorerModel train_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const TrainingOptions& options,
                                  std::vector<double>* loss_trace = nullptr);

/// scores(i, j) = w . featurize(i, j) + bias. `definitions` should be ranked
/// for `terms`.
EdgeScoreMatrix predict_matrix(const FeatureScorerModel& model, const TermSet& terms,
                               const DefinitionStore& definitions,
                               const EmbeddingTable& embeddings, const StopwordSet& stopwords);

/// Text model format with a version header; numbers use shortest
/// round-trip formatting so write/read is bit-exact.
std::string model_to_text(const FeatureScorerModel& model);
FeatureScorerModel model_from_text(std::string_view text);
void save_model(const FeatureScorerModel& model, const std::filesystem::path& path);
FeatureScorerModel load_model(const std::filesystem::path& path);

}  // namespace taxoforge
