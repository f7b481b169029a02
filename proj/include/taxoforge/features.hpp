#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "taxoforge/definitions.hpp"
#include "taxoforge/term_set.hpp"

namespace taxoforge {

inline constexpr Eigen::Index kFeatureCount = 7;
using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

/// Feature names in vector order:
///   head_word_match     child's last token equals parent's, strings differ
///   parent_containment  parent's tokens occur contiguously in the child
///   token_jaccard       Jaccard overlap of token sets
///   embedding_cosine    cosine of averaged token vectors
///   definition_cosine   parent vector vs child's top definition vector
///   definition_mention  parent occurs in child's top definition
///   char4_dice          Dice coefficient over character 4-grams
const std::vector<std::string>& feature_names();

/// Features 4 and 5 (zero-based) read definitions; without definitions
/// they are 0, which is how the closed-book setting is expressed.
inline constexpr std::array<Eigen::Index, 2> kDefinitionFeatures = {4, 5};

/// Precomputes per-term data for one term set so that all n*(n-1) ordered
/// pairs can be featurized cheaply. `definitions` should already be ranked
/// for this term set; only the top definition of each term is used.
class PairFeaturizer {
 public:
  PairFeaturizer(const std::vector<std::string>& terms, const DefinitionStore& definitions,
                 const EmbeddingTable& embeddings, const StopwordSet& stopwords);

  FeatureVector operator()(std::size_t parent, std::size_t child) const;
  std::size_t size() const noexcept { return info_.size(); }

 private:
  struct TermInfo {
    std::string text;
    std::vector<std::string> tokens;
    std::vector<std::string> token_set;  // sorted unique
    std::vector<std::u32string> grams;
    Eigen::VectorXd vector;
    bool has_definition = false;
    std::vector<std::string> definition_tokens;
    Eigen::VectorXd definition_vector;
  };
  std::vector<TermInfo> info_;
};

/// Features for a single (parent, child) pair of raw terms.
FeatureVector featurize(std::string_view parent, std::string_view child,
                        const DefinitionStore& definitions, const EmbeddingTable& embeddings,
                        const StopwordSet& stopwords = {});

}  // namespace taxoforge
