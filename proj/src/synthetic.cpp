#include "taxoforge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "taxoforge/error.hpp"
#include "taxoforge/io.hpp"
#include "taxoforge/text.hpp"

namespace taxoforge {

namespace {

class WordMaker {
 public:
  explicit WordMaker(std::mt19937_64& rng) : rng_(rng) {}

  std::string fresh() {
    static constexpr std::string_view kOnsets = "bdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    std::uniform_int_distribution<std::size_t> syllables(2, 3);
    std::uniform_int_distribution<std::size_t> onset(0, kOnsets.size() - 1);
    std::uniform_int_distribution<std::size_t> vowel(0, kVowels.size() - 1);
    for (;;) {
      std::string w;
      const std::size_t count = syllables(rng_);
      for (std::size_t k = 0; k < count; ++k) {
        w += kOnsets[onset(rng_)];
        w += kVowels[vowel(rng_)];
      }
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::mt19937_64& rng_;
  std::unordered_set<std::string> used_;
};

double round6(double x) { return std::round(x * 1e6) / 1e6; }

Eigen::VectorXd unit_gaussian(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v(k) = g(rng);
  return v.normalized();
}

Eigen::VectorXd near(std::mt19937_64& rng, const Eigen::VectorXd& center, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  Eigen::VectorXd v(center.size());
  for (Eigen::Index k = 0; k < center.size(); ++k) v(k) = round6(center(k) + g(rng));
  return v;
}

std::string last_token(const std::string& term) {
  const auto pos = term.rfind(' ');
  return pos == std::string::npos ? term : term.substr(pos + 1);
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.depth < 1 || spec.min_size < spec.depth + 1 || spec.min_size > spec.max_size) {
    throw InvalidArgument("infeasible synthetic spec: size range " + std::to_string(spec.min_size) +
                          ".." + std::to_string(spec.max_size) + " cannot hold depth " +
                          std::to_string(spec.depth));
  }
  for (double p : {spec.head_rate, spec.mention_prob, spec.distractor_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("synthetic probabilities must be in [0,1]");
  }
  if (spec.dimension < 1) throw InvalidArgument("embedding dimension must be positive");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  WordMaker words(rng);
  SyntheticCorpus corpus;
  corpus.embeddings = EmbeddingTable(spec.dimension);

  constexpr double kTokenSpread = 0.25;
  constexpr std::size_t kDistractorTopics = 3;
  constexpr std::size_t kDistractorWords = 40;
  constexpr std::size_t kFillerWords = 8;

  std::vector<Eigen::VectorXd> distractor_topics;
  for (std::size_t k = 0; k < kDistractorTopics; ++k) {
    distractor_topics.push_back(unit_gaussian(rng, spec.dimension));
  }
  std::vector<std::string> distractor_vocab;
  for (std::size_t k = 0; k < kDistractorWords; ++k) {
    distractor_vocab.push_back(words.fresh());
    corpus.embeddings.add(distractor_vocab.back(),
                          near(rng, distractor_topics[k % kDistractorTopics], kTokenSpread));
  }
  static constexpr std::string_view kDomains[] = {"(music)", "(mining)", "(nautical)",
                                                  "(telecommunications)", "(slang)"};

  std::uniform_int_distribution<std::size_t> size_dist(spec.min_size, spec.max_size);
  for (std::size_t t = 0; t < spec.n_trees; ++t) {
    const Eigen::VectorXd topic = unit_gaussian(rng, spec.dimension);
    auto topic_word = [&] {
      std::string w = words.fresh();
      corpus.embeddings.add(w, near(rng, topic, kTokenSpread));
      return w;
    };
    std::vector<std::string> fillers;
    for (std::size_t k = 0; k < kFillerWords; ++k) fillers.push_back(topic_word());
    std::uniform_int_distribution<std::size_t> pick_filler(0, fillers.size() - 1);
    auto filler = [&] { return fillers[pick_filler(rng)]; };

    // Gold structure in generation order: a root-to-leaf chain fixes the
    // depth, then the rest attach anywhere above the bottom level.
    const std::size_t n = size_dist(rng);
    std::vector<std::size_t> parent(n, Taxonomy::kNoParent);
    std::vector<std::size_t> depth(n, 0);
    for (std::size_t v = 1; v <= spec.depth; ++v) {
      parent[v] = v - 1;
      depth[v] = v;
    }
    for (std::size_t v = spec.depth + 1; v < n; ++v) {
      std::vector<std::size_t> open;
      for (std::size_t u = 0; u < v; ++u) {
        if (depth[u] < spec.depth) open.push_back(u);
      }
      std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
      parent[v] = open[pick(rng)];
      depth[v] = depth[parent[v]] + 1;
    }

    std::vector<std::string> terms(n);
    terms[0] = topic_word();
    for (std::size_t v = 1; v < n; ++v) {
      if (coin(rng) < spec.head_rate) {
        terms[v] = topic_word() + " " + last_token(terms[parent[v]]);
      } else {
        terms[v] = topic_word();
      }
    }

    for (std::size_t v = 0; v < n; ++v) {
      std::string relevant;
      if (v == 0) {
        relevant = "a general " + filler() + " " + filler() + " category";
      } else if (coin(rng) < spec.mention_prob) {
        relevant = "a kind of " + terms[parent[v]] + " that is " + filler() + " and " + filler();
      } else {
        relevant = "a " + filler() + " " + filler() + " thing that is " + filler();
      }
      std::vector<std::string> glosses{relevant};
      if (coin(rng) < spec.distractor_prob) {
        std::uniform_int_distribution<std::size_t> pick_d(0, distractor_vocab.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_dom(0, std::size(kDomains) - 1);
        std::uniform_int_distribution<std::size_t> pick_term(0, n - 1);
        std::string d = std::string(kDomains[pick_dom(rng)]) + " a " + distractor_vocab[pick_d(rng)] +
                        " " + distractor_vocab[pick_d(rng)] + " used for " +
                        distractor_vocab[pick_d(rng)] + " " + distractor_vocab[pick_d(rng)];
        if (coin(rng) < 0.5) {
          const std::size_t other = pick_term(rng);
          if (other != v) d += " like a " + terms[other];
        }
        if (coin(rng) < 0.5) {
          glosses.insert(glosses.begin(), d);
        } else {
          glosses.push_back(d);
        }
      }
      for (std::size_t k = 0; k < glosses.size(); ++k) {
        corpus.definitions.add({terms[v], k == 0 && glosses.size() > 1 ? "wiktionary" : "webster",
                                glosses[k], 0.0});
      }
    }

    // Shuffle term order so indices carry no structural hint.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::size_t> pos(n);
    for (std::size_t k = 0; k < n; ++k) pos[perm[k]] = k;
    std::vector<std::string> shuffled(n);
    std::vector<TermIndex> shuffled_parent(n, Taxonomy::kNoParent);
    for (std::size_t v = 0; v < n; ++v) {
      shuffled[pos[v]] = terms[v];
      if (v != 0) shuffled_parent[pos[v]] = pos[parent[v]];
    }
    char id[32];
    std::snprintf(id, sizeof id, "%s-%04zu", spec.name.c_str(), t);
    corpus.trees.emplace_back(TermSet(id, shuffled), pos[0], std::move(shuffled_parent));
  }
  return corpus;
}

std::filesystem::path write_synthetic_corpus(const SyntheticCorpus& corpus,
                                             const SyntheticSpec& spec,
                                             const std::filesystem::path& dir,
                                             const std::array<double, 3>& fractions,
                                             std::uint64_t split_seed) {
  auto splits = split_dataset(corpus.trees, fractions, split_seed);
  std::filesystem::create_directories(dir);
  CorpusManifest manifest;
  manifest.name = spec.name;
  manifest.language = spec.language;
  manifest.train = "train.jsonl";
  manifest.dev = "dev.jsonl";
  manifest.test = "test.jsonl";
  manifest.definitions = "definitions.jsonl";
  manifest.embeddings = "embeddings.txt";
  manifest.stopwords = "stopwords.txt";
  for (const auto& s : splits) {
    write_dataset(s.trees, dir / manifest.split_path(s.name));
  }
  write_file(dir / *manifest.definitions, definitions_to_jsonl(corpus.definitions, spec.language));
  write_file(dir / *manifest.embeddings, embeddings_to_text(corpus.embeddings));
  const StopwordSet stop = bundled_stopwords(spec.language);
  std::vector<std::string> sorted(stop.begin(), stop.end());
  std::sort(sorted.begin(), sorted.end());
  std::string stop_text;
  for (const auto& w : sorted) stop_text += w + "\n";
  write_file(dir / *manifest.stopwords, stop_text);
  const auto manifest_path = dir / "manifest.json";
  write_file(manifest_path, manifest_to_json_text(manifest));
  return manifest_path;
}

}  // namespace taxoforge
