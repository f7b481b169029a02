#include "taxoforge/scorer.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/io.hpp"
#include "taxoforge/text.hpp"

namespace taxoforge {

namespace {

constexpr std::string_view kModelHeader = "taxoforge-feature-model 1";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string make_hypothesis(std::string_view parent, std::string_view child,
                            std::string_view tmpl) {
  if (tmpl.find("{child}") == std::string_view::npos ||
      tmpl.find("{parent}") == std::string_view::npos) {
    throw InvalidArgument("hypothesis template needs both {child} and {parent}");
  }
  // Substitute into distinct markers first so a term containing "{parent}"
  // cannot be re-expanded.
  std::string out(tmpl);
  replace_all(out, "{child}", "\x01");
  replace_all(out, "{parent}", "\x02");
  replace_all(out, "\x01", canonicalize_term(child));
  replace_all(out, "\x02", canonicalize_term(parent));
  return out;
}

EdgeScoreMatrix oracle_scores(const Taxonomy& gold, double margin, double noise_sigma,
                              std::uint64_t seed) {
  if (!(margin > 0.0)) throw InvalidArgument("oracle margin must be positive");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  const auto n = static_cast<Eigen::Index>(gold.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [p, c] : gold.edges()) {
    s(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) = margin;
  }
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) s(i, j) += noise(rng);
      }
    }
  }
  return EdgeScoreMatrix(gold.terms(), std::move(s));
}

EdgeScoreMatrix random_scores(const TermSet& terms, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(terms.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) s(i, j) = u(rng);
    }
  }
  return EdgeScoreMatrix(terms, std::move(s));
}

RankedDefinitions rank_for_trees(const std::vector<Taxonomy>& trees, const DefinitionStore& store,
                                 const EmbeddingTable& embeddings, const StopwordSet& stopwords) {
  RankedDefinitions out;
  for (const auto& t : trees) out[t.id()] = rerank_store(store, t.terms(), embeddings, stopwords);
  return out;
}

namespace {

const DefinitionStore& store_for(const RankedDefinitions& defs, const std::string& tree_id) {
  static const DefinitionStore kEmpty;
  auto it = defs.find(tree_id);
  return it == defs.end() ? kEmpty : it->second;
}

}  // namespace

std::vector<PairExample> generate_training_pairs(const std::vector<Taxonomy>& trees,
                                                 const RankedDefinitions& definitions,
                                                 const NegativePolicy& policy,
                                                 const ContextLimits& limits) {
  std::vector<PairExample> out;
  std::mt19937_64 rng(std::holds_alternative<SampledNegatives>(policy)
                          ? std::get<SampledNegatives>(policy).seed
                          : 0);
  for (const auto& tree : trees) {
    const std::size_t n = tree.size();
    const auto& store = store_for(definitions, tree.id());
    std::vector<char> keep(n * n, 1);
    std::size_t positives = n - 1;
    if (const auto* sampled = std::get_if<SampledNegatives>(&policy)) {
      std::vector<std::size_t> negatives;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j && tree.parent(j) != i) negatives.push_back(i * n + j);
        }
      }
      const std::size_t want = sampled->ratio * positives;
      if (want > negatives.size()) {
        throw InvalidArgument("tree '" + tree.id() + "': " + std::to_string(want) +
                              " negatives requested but only " +
                              std::to_string(negatives.size()) + " available");
      }
      std::shuffle(negatives.begin(), negatives.end(), rng);
      for (std::size_t k = want; k < negatives.size(); ++k) keep[negatives[k]] = 0;
    }
    auto context = [&](const std::string& term) {
      return store.lookup(term).empty() ? std::string() : term_context(term, store, limits);
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !keep[i * n + j]) continue;
        const auto& terms = tree.terms();
        out.push_back({tree.id(), terms[i], terms[j], tree.parent(j) == i ? 1 : 0,
                       context(terms[i]), context(terms[j])});
      }
    }
  }
  return out;
}

std::string pair_to_json_text(const PairExample& pair, std::string_view tmpl) {
  nlohmann::ordered_json doc = {{"tree_id", pair.tree_id},
                                {"parent", pair.parent},
                                {"child", pair.child},
                                {"label", pair.label},
                                {"hypothesis", make_hypothesis(pair.parent, pair.child, tmpl)},
                                {"parent_context", pair.parent_context},
                                {"child_context", pair.child_context}};
  return doc.dump();
}

bool operator==(const FeatureScorerModel& a, const FeatureScorerModel& b) {
  auto same = [](double x, double y) { return std::memcmp(&x, &y, sizeof(double)) == 0; };
  if (a.feature_spec != b.feature_spec || a.weights.size() != b.weights.size()) return false;
  for (Eigen::Index k = 0; k < a.weights.size(); ++k) {
    if (!same(a.weights(k), b.weights(k))) return false;
  }
  return same(a.training.learning_rate, b.training.learning_rate) &&
         a.training.epochs == b.training.epochs && same(a.training.l2, b.training.l2) &&
         a.training.seed == b.training.seed && same(a.final_loss, b.final_loss);
}

Eigen::MatrixXd design_matrix(const std::vector<PairExample>& examples,
                              const RankedDefinitions& definitions,
                              const EmbeddingTable& embeddings, const StopwordSet& stopwords) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(examples.size()), kFeatureCount + 1);
  // Examples of one tree are contiguous; featurize each block with one
  // PairFeaturizer over the block's terms.
  std::size_t begin = 0;
  while (begin < examples.size()) {
    std::size_t end = begin;
    while (end < examples.size() && examples[end].tree_id == examples[begin].tree_id) ++end;
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::size_t> index;
    auto intern = [&](const std::string& t) {
      auto [it, inserted] = index.emplace(t, terms.size());
      if (inserted) terms.push_back(t);
      return it->second;
    };
    std::vector<std::pair<std::size_t, std::size_t>> ids;
    for (std::size_t k = begin; k < end; ++k) {
      ids.emplace_back(intern(examples[k].parent), intern(examples[k].child));
    }
    PairFeaturizer fz(terms, store_for(definitions, examples[begin].tree_id), embeddings,
                      stopwords);
    for (std::size_t k = begin; k < end; ++k) {
      const auto row = static_cast<Eigen::Index>(k);
      x.row(row).head(kFeatureCount) = fz(ids[k - begin].first, ids[k - begin].second).transpose();
      x(row, kFeatureCount) = 1.0;
    }
    begin = end;
  }
  return x;
}

FeatureScorerModel train_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const TrainingOptions& options,
                                  std::vector<double>* loss_trace) {
  if (x.rows() == 0 || x.rows() != y.size()) throw InvalidArgument("empty or mismatched training data");
  const double positives = y.sum();
  if (positives == 0.0 || positives == static_cast<double>(y.size())) {
    throw InvalidArgument("degenerate label set: need both positive and negative examples");
  }
  if (!(options.learning_rate > 0.0) || options.epochs < 0 || !(options.l2 >= 0.0)) {
    throw InvalidArgument("invalid training hyperparameters");
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  Eigen::VectorXd w(x.cols());
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = init(rng);

  if (loss_trace) {
    loss_trace->clear();
    loss_trace->push_back(logistic_loss(x, y, w, options.l2));
  }
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    w -= options.learning_rate * logistic_gradient(x, y, w, options.l2);
    if (loss_trace) loss_trace->push_back(logistic_loss(x, y, w, options.l2));
  }
  FeatureScorerModel model;
  model.feature_spec = feature_names();
  model.weights = std::move(w);
  model.training = options;
  model.final_loss = logistic_loss(x, y, model.weights, options.l2);
  return model;
}

FeatureScorerModel train_feature_scorer(const std::vector<PairExample>& examples,
                                        const RankedDefinitions& definitions,
                                        const EmbeddingTable& embeddings,
                                        const StopwordSet& stopwords,
                                        const TrainingOptions& options,
                                        std::vector<double>* loss_trace) {
  const Eigen::MatrixXd x = design_matrix(examples, definitions, embeddings, stopwords);
  Eigen::VectorXd y(static_cast<Eigen::Index>(examples.size()));
  for (std::size_t k = 0; k < examples.size(); ++k) {
    y(static_cast<Eigen::Index>(k)) = examples[k].label;
  }
  return train_logistic(x, y, options, loss_trace);
}

EdgeScoreMatrix predict_matrix(const FeatureScorerModel& model, const TermSet& terms,
                               const DefinitionStore& definitions,
                               const EmbeddingTable& embeddings, const StopwordSet& stopwords) {
  if (model.feature_spec != feature_names() || model.weights.size() != kFeatureCount + 1) {
    throw ValidationError("feature spec mismatch", "model features do not match this build");
  }
  const auto n = static_cast<Eigen::Index>(terms.size());
  PairFeaturizer fz(terms.terms(), definitions, embeddings, stopwords);
  const auto w = model.weights.head(kFeatureCount);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) {
        s(i, j) = w.dot(fz(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) + model.bias();
      }
    }
  }
  return EdgeScoreMatrix(terms, std::move(s));
}

std::string model_to_text(const FeatureScorerModel& model) {
  std::ostringstream out;
  out << kModelHeader << '\n';
  out << "features";
  for (const auto& f : model.feature_spec) out << ' ' << f;
  out << '\n';
  out << "seed " << model.training.seed << '\n';
  out << "learning_rate " << format_double(model.training.learning_rate) << '\n';
  out << "epochs " << model.training.epochs << '\n';
  out << "l2 " << format_double(model.training.l2) << '\n';
  out << "final_loss " << format_double(model.final_loss) << '\n';
  for (std::size_t k = 0; k < model.feature_spec.size(); ++k) {
    out << "weight " << model.feature_spec[k] << ' '
        << format_double(model.weights(static_cast<Eigen::Index>(k))) << '\n';
  }
  out << "bias " << format_double(model.bias()) << '\n';
  return out.str();
}

FeatureScorerModel model_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](std::string_view key) {
    if (!std::getline(in, line)) {
      throw ValidationError("malformed model", "missing '" + std::string(key) + "' line");
    }
    ++line_no;
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) {
      throw ValidationError("malformed model", "line " + std::to_string(line_no) + ": expected '" +
                                                   std::string(key) + "'");
    }
    std::vector<std::string> rest;
    for (std::string f; ls >> f;) rest.push_back(f);
    return rest;
  };
  if (!std::getline(in, line) || line != kModelHeader) {
    throw ValidationError("malformed model", "bad or unsupported version header");
  }
  ++line_no;
  FeatureScorerModel model;
  model.feature_spec = next("features");
  auto single = [&](std::string_view key) {
    auto v = next(key);
    if (v.size() != 1) throw ValidationError("malformed model", "line " + std::to_string(line_no));
    return v[0];
  };
  try {
    model.training.seed = std::stoull(single("seed"));
    model.training.learning_rate = parse_double(single("learning_rate"));
    model.training.epochs = std::stoi(single("epochs"));
    model.training.l2 = parse_double(single("l2"));
    model.final_loss = parse_double(single("final_loss"));
    model.weights.resize(static_cast<Eigen::Index>(model.feature_spec.size()) + 1);
    for (std::size_t k = 0; k < model.feature_spec.size(); ++k) {
      auto v = next("weight");
      if (v.size() != 2 || v[0] != model.feature_spec[k]) {
        throw ValidationError("malformed model", "weight line " + std::to_string(line_no) +
                                                     " does not match feature list");
      }
      model.weights(static_cast<Eigen::Index>(k)) = parse_double(v[1]);
    }
    model.weights(model.weights.size() - 1) = parse_double(single("bias"));
  } catch (const std::logic_error&) {
    throw ValidationError("malformed model", "bad integer near line " + std::to_string(line_no));
  }
  if (!model.weights.allFinite()) throw ValidationError("non-finite weight", "");
  return model;
}

void save_model(const FeatureScorerModel& model, const std::filesystem::path& path) {
  write_file(path, model_to_text(model));
}

FeatureScorerModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_text(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError::at(path.string(), e);
  }
}

}  // namespace taxoforge
