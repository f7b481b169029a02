#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "taxoforge/dataset.hpp"
#include "taxoforge/definitions.hpp"
#include "taxoforge/evaluation.hpp"
#include "taxoforge/induce.hpp"
#include "taxoforge/scorer.hpp"

namespace taxoforge {

/// Runs fn(0..count-1) on up to `jobs` threads. Each index runs exactly
/// once; callers write results into per-index slots.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Independent stream seed for item `index` under `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// A manifest with every referenced file loaded. Missing optional files
/// leave the corresponding member empty; stopwords fall back to the bundled
/// list for the manifest language.
struct Corpus {
  CorpusManifest manifest;
  DatasetSplit train, dev, test;
  DefinitionStore definitions;
  EmbeddingTable embeddings;
  StopwordSet stopwords;
  std::vector<std::string> warnings;

  const DatasetSplit& split(SplitName name) const;
};

Corpus load_corpus(const std::filesystem::path& manifest_path, bool strict = true);

enum class ScorerKind { kOracle, kFeature, kExternal, kRandom };
enum class RootPolicyKind { kGiven, kBest, kVirtual };

struct BenchmarkConfig {
  ScorerKind scorer = ScorerKind::kFeature;
  RootPolicyKind root_policy = RootPolicyKind::kBest;
  double virtual_prior = 0.0;
  bool strict = false;
  bool open_book = false;
  int restarts = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  TrainingOptions training;
  std::size_t negative_ratio = 0;  // 0 = all negatives
  double oracle_margin = 1.0;
  double oracle_noise = 0.1;
  std::filesystem::path external_dir;  // <tree_id>.json per test tree
  ContextLimits context;
};

/// Root policy for one tree; kGiven takes the gold root.
RootPolicy make_root_policy(const BenchmarkConfig& config, const Taxonomy& gold);

/// Training pairs for `trees` honoring open/closed book and the negative
/// policy. Closed book ignores definitions entirely.
std::vector<PairExample> training_pairs(const Corpus& corpus, const std::vector<Taxonomy>& trees,
                                        bool open_book, std::size_t negative_ratio,
                                        std::uint64_t seed, const ContextLimits& limits = {});

FeatureScorerModel train_on_split(const Corpus& corpus, const std::vector<Taxonomy>& trees,
                                  bool open_book, std::size_t negative_ratio,
                                  const TrainingOptions& options);

/// Score matrix for one tree's terms with a trained model. Closed book
/// featurizes without definitions.
EdgeScoreMatrix feature_scores(const Corpus& corpus, const FeatureScorerModel& model,
                               const TermSet& terms, bool open_book);

/// One restart: score every test tree, induce, evaluate.
EvalReport run_restart(const Corpus& corpus, const BenchmarkConfig& config, int restart);

/// Restart seeds are seed + restart index; the result is the restart mean.
EvalReport run_benchmark(const Corpus& corpus, const BenchmarkConfig& config,
                         std::vector<EvalReport>* per_restart = nullptr);

}  // namespace taxoforge
