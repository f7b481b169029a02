#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "taxoforge/dataset.hpp"
#include "taxoforge/definitions.hpp"
#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

struct SyntheticSpec {
  std::size_t n_trees = 100;
  std::size_t min_size = 10;
  std::size_t max_size = 50;
  std::size_t depth = 3;
  double head_rate = 0.5;         // child term = "<modifier> <parent head token>"
  double mention_prob = 0.8;      // child's gloss names its gold parent
  double distractor_prob = 0.5;   // extra wrong-sense gloss per term
  Eigen::Index dimension = 16;
  std::uint64_t seed = 7;
  std::string name = "synthetic";
  std::string language = "en";
};

struct SyntheticCorpus {
  std::vector<Taxonomy> trees;
  DefinitionStore definitions;
  EmbeddingTable embeddings;
};

/// Random medium-profile trees over invented words, glosses and word
/// vectors, all drawn from one stream seeded by `spec.seed`. Term order
/// inside each tree is shuffled so index order carries no structure.
/// Throws InvalidArgument when the size range cannot hold the depth.
SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec);

/// Splits the trees and writes train/dev/test JSONL, definitions,
/// embeddings, stopwords and manifest.json into `dir`. Returns the manifest
/// path.
std::filesystem::path write_synthetic_corpus(const SyntheticCorpus& corpus,
                                             const SyntheticSpec& spec,
                                             const std::filesystem::path& dir,
                                             const std::array<double, 3>& fractions,
                                             std::uint64_t split_seed);

}  // namespace taxoforge
