#include "taxoforge/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "taxoforge/error.hpp"
#include "taxoforge/score_matrix.hpp"

namespace taxoforge {

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const std::size_t n_workers = std::min(jobs, count);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

const DatasetSplit& Corpus::split(SplitName name) const {
  switch (name) {
    case SplitName::kTrain: return train;
    case SplitName::kDev: return dev;
    case SplitName::kTest: return test;
  }
  return test;
}

Corpus load_corpus(const std::filesystem::path& manifest_path, bool strict) {
  Corpus c;
  c.manifest = load_manifest(manifest_path);
  c.train = load_dataset(c.manifest.train, SplitName::kTrain);
  c.dev = load_dataset(c.manifest.dev, SplitName::kDev);
  c.test = load_dataset(c.manifest.test, SplitName::kTest);
  check_unique_ids({&c.train.trees, &c.dev.trees, &c.test.trees});
  if (c.manifest.definitions) {
    auto loaded = load_definitions(*c.manifest.definitions, strict);
    c.definitions = std::move(loaded.store);
    c.warnings = std::move(loaded.warnings);
  }
  if (c.manifest.embeddings) c.embeddings = load_embeddings(*c.manifest.embeddings);
  c.stopwords = c.manifest.stopwords ? load_stopwords(*c.manifest.stopwords)
                                     : bundled_stopwords(c.manifest.language);
  return c;
}

RootPolicy make_root_policy(const BenchmarkConfig& config, const Taxonomy& gold) {
  switch (config.root_policy) {
    case RootPolicyKind::kGiven: return GivenRoot{gold.root()};
    case RootPolicyKind::kBest: return BestOfAllRoots{};
    case RootPolicyKind::kVirtual: return VirtualRoot{config.virtual_prior, config.strict};
  }
  return BestOfAllRoots{};
}

std::vector<PairExample> training_pairs(const Corpus& corpus, const std::vector<Taxonomy>& trees,
                                        bool open_book, std::size_t negative_ratio,
                                        std::uint64_t seed, const ContextLimits& limits) {
  RankedDefinitions ranked;
  if (open_book) ranked = rank_for_trees(trees, corpus.definitions, corpus.embeddings, corpus.stopwords);
  NegativePolicy policy = AllNegatives{};
  if (negative_ratio > 0) policy = SampledNegatives{negative_ratio, seed};
  return generate_training_pairs(trees, ranked, policy, limits);
}

FeatureScorerModel train_on_split(const Corpus& corpus, const std::vector<Taxonomy>& trees,
                                  bool open_book, std::size_t negative_ratio,
                                  const TrainingOptions& options) {
  if (trees.empty()) throw ValidationError("empty training split", "");
  RankedDefinitions ranked;
  if (open_book) ranked = rank_for_trees(trees, corpus.definitions, corpus.embeddings, corpus.stopwords);
  NegativePolicy policy = AllNegatives{};
  if (negative_ratio > 0) policy = SampledNegatives{negative_ratio, options.seed};
  const auto pairs = generate_training_pairs(trees, ranked, policy);
  return train_feature_scorer(pairs, ranked, corpus.embeddings, corpus.stopwords, options);
}

EdgeScoreMatrix feature_scores(const Corpus& corpus, const FeatureScorerModel& model,
                               const TermSet& terms, bool open_book) {
  if (!open_book) return predict_matrix(model, terms, {}, corpus.embeddings, corpus.stopwords);
  const DefinitionStore ranked =
      rerank_store(corpus.definitions, terms, corpus.embeddings, corpus.stopwords);
  return predict_matrix(model, terms, ranked, corpus.embeddings, corpus.stopwords);
}

EvalReport run_restart(const Corpus& corpus, const BenchmarkConfig& config, int restart) {
  const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(restart);
  const auto& test = corpus.test.trees;
  if (test.empty()) throw ValidationError("empty test split", corpus.manifest.test.string());

  std::optional<FeatureScorerModel> model;
  if (config.scorer == ScorerKind::kFeature) {
    TrainingOptions options = config.training;
    options.seed = seed;
    model = train_on_split(corpus, corpus.train.trees, config.open_book, config.negative_ratio,
                           options);
  }

  std::vector<std::optional<TreeScore>> scores(test.size());
  parallel_for(test.size(), config.jobs, [&](std::size_t k) {
    const Taxonomy& gold = test[k];
    EdgeScoreMatrix matrix = [&] {
      switch (config.scorer) {
        case ScorerKind::kOracle:
          return oracle_scores(gold, config.oracle_margin, config.oracle_noise, derive_seed(seed, k));
        case ScorerKind::kFeature:
          return feature_scores(corpus, *model, gold.terms(), config.open_book);
        case ScorerKind::kExternal:
          return load_external_matrix(config.external_dir / (gold.id() + ".json"), gold.terms());
        case ScorerKind::kRandom:
          break;
      }
      return random_scores(gold.terms(), derive_seed(seed, k));
    }();
    const Taxonomy predicted = induce(matrix, make_root_policy(config, gold));
    scores[k] = TreeScore{gold.id(), ancestor_prf(predicted, gold)};
  });
  std::vector<TreeScore> per_tree;
  for (auto& s : scores) per_tree.push_back(std::move(*s));
  return summarize(std::move(per_tree));
}

EvalReport run_benchmark(const Corpus& corpus, const BenchmarkConfig& config,
                         std::vector<EvalReport>* per_restart) {
  if (config.restarts < 1) throw InvalidArgument("restarts must be >= 1");
  std::vector<EvalReport> reports;
  for (int r = 0; r < config.restarts; ++r) reports.push_back(run_restart(corpus, config, r));
  EvalReport out = aggregate_restarts(reports);
  if (per_restart) *per_restart = std::move(reports);
  return out;
}

}  // namespace taxoforge
