#include "taxoforge/cli.hpp"

#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "taxoforge/arborescence.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/io.hpp"
#include "taxoforge/pipeline.hpp"
#include "taxoforge/synthetic.hpp"
#include "taxoforge/text.hpp"

namespace taxoforge::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

const std::map<std::string, RootPolicyKind> kRootPolicies = {
    {"given", RootPolicyKind::kGiven}, {"best", RootPolicyKind::kBest},
    {"virtual", RootPolicyKind::kVirtual}};
const std::map<std::string, ScorerKind> kScorers = {{"oracle", ScorerKind::kOracle},
                                                    {"feature", ScorerKind::kFeature},
                                                    {"external", ScorerKind::kExternal},
                                                    {"random", ScorerKind::kRandom}};

// Everything a subcommand may read; CLI11 binds straight into it.
struct Options {
  std::string corpus;
  std::vector<std::string> scores;
  std::string pred, gold;
  std::string root_policy = "best";
  std::string root;
  double virtual_prior = 0.0;
  std::string scorer = "feature";
  bool open_book = false;
  int restarts = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out;
  bool strict = false;
  bool harmonic_macro = false;
  bool profile = false;
  std::string split = "test";
  std::string model;
  std::string scores_dir;
  double learning_rate = TrainingOptions{}.learning_rate;
  int epochs = TrainingOptions{}.epochs;
  double l2 = TrainingOptions{}.l2;
  std::size_t negative_ratio = 0;
  double margin = 1.0;
  double noise = 0.1;
  std::string hypothesis_template{kDefaultHypothesisTemplate};
  std::size_t max_defs = ContextLimits{}.max_defs;
  std::size_t max_chars = ContextLimits{}.max_chars;
  SyntheticSpec synthetic;
  std::vector<double> fractions = {533, 114, 114};
};

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

RootPolicy policy_for(const Options& o, const EdgeScoreMatrix& m) {
  switch (kRootPolicies.at(o.root_policy)) {
    case RootPolicyKind::kGiven: {
      if (o.root.empty()) throw InvalidArgument("--root-policy given needs --root TERM");
      const auto idx = m.terms().index_of(canonicalize_term(o.root));
      if (!idx) throw ValidationError("unknown term", m.tree_id() + ": root '" + o.root + "'");
      return GivenRoot{*idx};
    }
    case RootPolicyKind::kBest: return BestOfAllRoots{};
    case RootPolicyKind::kVirtual: return VirtualRoot{o.virtual_prior, o.strict};
  }
  return BestOfAllRoots{};
}

BenchmarkConfig benchmark_config(const Options& o) {
  BenchmarkConfig c;
  c.scorer = kScorers.at(o.scorer);
  c.root_policy = kRootPolicies.at(o.root_policy);
  c.virtual_prior = o.virtual_prior;
  c.strict = o.strict;
  c.open_book = o.open_book;
  c.restarts = o.restarts;
  c.seed = o.seed;
  c.jobs = o.jobs;
  c.training = {o.learning_rate, o.epochs, o.l2, o.seed};
  c.negative_ratio = o.negative_ratio;
  c.oracle_margin = o.margin;
  c.oracle_noise = o.noise;
  c.external_dir = o.scores_dir;
  c.context = {o.max_defs, o.max_chars};
  return c;
}

Corpus require_corpus(const Options& o) {
  if (o.corpus.empty()) throw InvalidArgument("--corpus is required");
  Corpus c = load_corpus(o.corpus, o.strict);
  if (o.open_book && (!c.manifest.definitions || !c.manifest.embeddings)) {
    throw ValidationError("open book needs definitions and embeddings",
                          "manifest " + o.corpus + " lacks one of them");
  }
  return c;
}

std::array<double, 3> normalized_fractions(const std::vector<double>& w) {
  if (w.size() != 3) throw InvalidArgument("--fractions needs three values");
  const double total = w[0] + w[1] + w[2];
  if (!(total > 0)) throw InvalidArgument("--fractions must have a positive sum");
  return {w[0] / total, w[1] / total, w[2] / total};
}

// Subcommands.

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.scores.empty() && o.pred.empty() && o.gold.empty() && o.corpus.empty()) {
    throw InvalidArgument("validate needs --scores, --pred, --gold or --corpus");
  }
  int status = kExitOk;
  auto check_trees = [&](const std::string& path, const std::vector<Taxonomy>& trees) {
    std::size_t warnings = 0;
    if (o.profile || o.strict) {
      for (const auto& t : trees) {
        for (const auto& w : check_profile(t)) {
          err << "warning: " << path << ": " << w << "\n";
          ++warnings;
        }
      }
    }
    if (o.strict && warnings > 0) status = kExitInvalid;
    out << "ok " << path << " (" << trees.size() << " trees)\n";
  };
  for (const auto& s : o.scores) {
    const auto m = load_external_matrix(s);
    out << "ok " << s << " (" << m.size() << " terms)\n";
  }
  for (const auto& p : {o.pred, o.gold}) {
    if (!p.empty()) check_trees(p, load_dataset(p).trees);
  }
  if (!o.corpus.empty()) {
    const Corpus c = load_corpus(o.corpus, o.strict);
    for (const auto& w : c.warnings) err << "warning: " << w << "\n";
    for (const auto* s : {&c.train, &c.dev, &c.test}) {
      check_trees(c.manifest.split_path(s->name).string(), s->trees);
    }
    out << "ok " << o.corpus << " (" << c.definitions.term_count() << " defined terms, "
        << c.embeddings.size() << " vectors)\n";
  }
  return status;
}

int cmd_induce(const Options& o, std::ostream& out, std::ostream&) {
  if (o.scores.empty()) throw InvalidArgument("induce needs --scores");
  std::vector<EdgeScoreMatrix> matrices;
  for (const auto& s : o.scores) matrices.push_back(load_external_matrix(s));
  std::vector<std::optional<Taxonomy>> trees(matrices.size());
  parallel_for(matrices.size(), o.jobs, [&](std::size_t k) {
    trees[k] = induce(matrices[k], policy_for(o, matrices[k]));
  });
  std::string text;
  for (const auto& t : trees) text += to_json_text(*t) + "\n";
  emit(o, out, text);
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.pred.empty() || o.gold.empty()) throw InvalidArgument("evaluate needs --pred and --gold");
  const auto pred = load_dataset(o.pred).trees;
  const auto gold = load_dataset(o.gold).trees;
  std::map<std::string, const Taxonomy*> by_id;
  for (const auto& t : pred) by_id[t.id()] = &t;
  std::vector<std::pair<Taxonomy, Taxonomy>> pairs;
  for (const auto& g : gold) {
    auto it = by_id.find(g.id());
    if (it == by_id.end()) throw ValidationError("missing prediction", "tree '" + g.id() + "'");
    pairs.emplace_back(*it->second, g);
  }
  if (pairs.empty()) throw ValidationError("empty gold set", o.gold);
  EvalReport report = evaluate_set(pairs);
  if (o.harmonic_macro) report.macro.f1 = harmonic_macro_f1(report);
  emit(o, out, report_to_json_text(report));
  err << "macro P=" << format_double(round_half_even(report.macro.precision, 6))
      << " R=" << format_double(round_half_even(report.macro.recall, 6))
      << " F1=" << format_double(round_half_even(report.macro.f1, 6)) << " over "
      << report.n_trees << " trees\n";
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const Corpus c = require_corpus(o);
  const FeatureScorerModel model =
      train_on_split(c, c.train.trees, o.open_book, o.negative_ratio,
                     {o.learning_rate, o.epochs, o.l2, o.seed});
  emit(o, out, model_to_text(model));
  err << "trained on " << c.train.trees.size() << " trees, final loss "
      << format_double(model.final_loss) << "\n";
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream&) {
  const Corpus c = require_corpus(o);
  const auto& trees = c.split(split_name_from_string(o.split)).trees;
  const ScorerKind kind = kScorers.at(o.scorer);
  if (kind == ScorerKind::kExternal) throw InvalidArgument("score cannot use the external scorer");
  std::optional<FeatureScorerModel> model;
  if (kind == ScorerKind::kFeature) {
    if (o.model.empty()) throw InvalidArgument("--scorer feature needs --model");
    model = load_model(o.model);
  }
  std::vector<std::optional<EdgeScoreMatrix>> matrices(trees.size());
  parallel_for(trees.size(), o.jobs, [&](std::size_t k) {
    const auto& t = trees[k];
    switch (kind) {
      case ScorerKind::kOracle:
        matrices[k] = oracle_scores(t, o.margin, o.noise, derive_seed(o.seed, k));
        break;
      case ScorerKind::kFeature:
        matrices[k] = feature_scores(c, *model, t.terms(), o.open_book);
        break;
      default:
        matrices[k] = random_scores(t.terms(), derive_seed(o.seed, k));
    }
  });
  if (o.out.empty()) {
    for (const auto& m : matrices) out << to_json_text(*m);
  } else {
    for (const auto& m : matrices) {
      write_score_matrix(*m, std::filesystem::path(o.out) / (m->tree_id() + ".json"));
    }
  }
  return kExitOk;
}

int cmd_rank_defs(const Options& o, std::ostream& out, std::ostream&) {
  const Corpus c = require_corpus(o);
  std::string text;
  for (const auto& t : c.split(split_name_from_string(o.split)).trees) {
    const DefinitionStore ranked = rerank_store(c.definitions, t.terms(), c.embeddings, c.stopwords);
    for (const auto& term : t.terms().terms()) {
      nlohmann::ordered_json defs = nlohmann::ordered_json::array();
      for (const auto& r : ranked.lookup(term)) {
        defs.push_back({{"source", r.source}, {"text", r.text}, {"relevance", r.relevance}});
      }
      nlohmann::ordered_json doc = {{"tree_id", t.id()}, {"term", term}, {"definitions", defs}};
      text += doc.dump() + "\n";
    }
  }
  emit(o, out, text);
  return kExitOk;
}

int cmd_export_pairs(const Options& o, std::ostream& out, std::ostream& err) {
  const Corpus c = require_corpus(o);
  const auto& trees = c.split(split_name_from_string(o.split)).trees;
  if (trees.empty()) throw ValidationError("empty split", o.split);
  const auto pairs = training_pairs(c, trees, o.open_book, o.negative_ratio, o.seed,
                                    {o.max_defs, o.max_chars});
  std::string text;
  std::size_t positives = 0;
  for (const auto& p : pairs) {
    text += pair_to_json_text(p, o.hypothesis_template) + "\n";
    positives += static_cast<std::size_t>(p.label);
  }
  emit(o, out, text);
  err << "exported " << pairs.size() << " pairs (" << positives << " positive, "
      << pairs.size() - positives << " negative)\n";
  return kExitOk;
}

int cmd_benchmark(const Options& o, std::ostream& out, std::ostream& err) {
  const Corpus c = require_corpus(o);
  const BenchmarkConfig config = benchmark_config(o);
  if (config.scorer == ScorerKind::kExternal && o.scores_dir.empty()) {
    throw InvalidArgument("--scorer external needs --scores-dir");
  }
  std::vector<EvalReport> restarts;
  const EvalReport report = run_benchmark(c, config, &restarts);
  emit(o, out, report_to_json_text(report));
  for (std::size_t r = 0; r < restarts.size(); ++r) {
    err << "restart " << r << " (seed " << o.seed + r << "): macro F1 "
        << format_double(round_half_even(restarts[r].macro.f1, 6)) << "\n";
  }
  err << "mean over " << restarts.size() << " restarts: macro P="
      << format_double(round_half_even(report.macro.precision, 6))
      << " R=" << format_double(round_half_even(report.macro.recall, 6))
      << " F1=" << format_double(round_half_even(report.macro.f1, 6)) << "\n";
  return kExitOk;
}

int cmd_make_synthetic(const Options& o, std::ostream& out, std::ostream&) {
  if (o.out.empty()) throw InvalidArgument("make-synthetic needs --out DIR");
  SyntheticSpec spec = o.synthetic;
  spec.seed = o.seed;
  const SyntheticCorpus corpus = make_synthetic_corpus(spec);
  const auto manifest =
      write_synthetic_corpus(corpus, spec, o.out, normalized_fractions(o.fractions), o.seed);
  out << manifest.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Taxonomy induction from pairwise parenthood scores", "taxoforge"};
  app.require_subcommand(1);

  auto policy_flags = [&](CLI::App* sub) {
    sub->add_option("--root-policy", o.root_policy, "given | best | virtual")
        ->check(CLI::IsMember({"given", "best", "virtual"}));
    sub->add_option("--virtual-prior", o.virtual_prior, "Score of every virtual-root edge");
    sub->add_flag("--strict", o.strict, "Fail instead of repairing or warning");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto training_flags = [&](CLI::App* sub) {
    sub->add_option("--lr", o.learning_rate, "Gradient-descent step size");
    sub->add_option("--epochs", o.epochs, "Full-batch epochs");
    sub->add_option("--l2", o.l2, "L2 penalty");
    sub->add_option("--neg-ratio", o.negative_ratio, "Negatives per positive (0 = all)");
  };
  auto corpus_flags = [&](CLI::App* sub) {
    sub->add_option("--corpus", o.corpus, "Corpus manifest")->required();
    sub->add_flag("--open-book", o.open_book, "Use re-ranked definitions");
    sub->add_option("--seed", o.seed, "Seed for every random choice");
    sub->add_option("--out", o.out, "Output path (default: stdout)");
  };

  auto* validate = app.add_subcommand("validate", "Check score-matrix, dataset or corpus files");
  validate->add_option("--scores", o.scores, "Score-matrix files");
  validate->add_option("--pred,--gold", o.pred, "Taxonomy dataset file");
  validate->add_option("--corpus", o.corpus, "Corpus manifest");
  validate->add_flag("--profile", o.profile, "Report trees outside the medium-subtree profile");
  validate->add_flag("--strict", o.strict, "Profile warnings fail; definitions parsed strictly");

  auto* induce_cmd = app.add_subcommand("induce", "Decode score matrices into taxonomies");
  induce_cmd->add_option("--scores", o.scores, "Score-matrix files")->required();
  induce_cmd->add_option("--root", o.root, "Root term for --root-policy given");
  induce_cmd->add_option("--out", o.out, "Output JSONL (default: stdout)");
  policy_flags(induce_cmd);

  auto* evaluate = app.add_subcommand("evaluate", "Ancestor P/R/F1 of predictions against gold");
  evaluate->add_option("--pred", o.pred, "Predicted taxonomies (JSONL)")->required();
  evaluate->add_option("--gold", o.gold, "Gold taxonomies (JSONL)")->required();
  evaluate->add_flag("--harmonic-macro", o.harmonic_macro,
                     "Report macro F1 as the harmonic mean of macro P and R");
  evaluate->add_option("--out", o.out, "Report file (default: stdout)");

  auto* train = app.add_subcommand("train", "Train the feature scorer on the train split");
  corpus_flags(train);
  training_flags(train);
  train->add_flag("--strict", o.strict, "Parse definitions strictly");

  auto* score = app.add_subcommand("score", "Write score matrices for a split");
  corpus_flags(score);
  score->add_option("--split", o.split, "train | dev | test")
      ->check(CLI::IsMember({"train", "dev", "test"}));
  score->add_option("--scorer", o.scorer, "oracle | feature | random")
      ->check(CLI::IsMember({"oracle", "feature", "random"}));
  score->add_option("--model", o.model, "Feature model file");
  score->add_option("--margin", o.margin, "Oracle gold-edge score");
  score->add_option("--noise", o.noise, "Oracle noise sigma");
  score->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  score->add_flag("--strict", o.strict, "Parse definitions strictly");

  auto* rank = app.add_subcommand("rank-defs", "Re-rank each term's definitions per tree");
  corpus_flags(rank);
  rank->add_option("--split", o.split, "train | dev | test")
      ->check(CLI::IsMember({"train", "dev", "test"}));
  rank->add_flag("--strict", o.strict, "Parse definitions strictly");

  auto* export_cmd = app.add_subcommand("export-pairs", "Write labelled pairs for an external scorer");
  corpus_flags(export_cmd);
  export_cmd->add_option("--split", o.split, "train | dev | test")
      ->check(CLI::IsMember({"train", "dev", "test"}));
  export_cmd->add_option("--neg-ratio", o.negative_ratio, "Negatives per positive (0 = all)");
  export_cmd->add_option("--template", o.hypothesis_template, "Hypothesis template");
  export_cmd->add_option("--max-defs", o.max_defs, "Definitions per context");
  export_cmd->add_option("--max-chars", o.max_chars, "Characters of definitions per context");
  export_cmd->add_flag("--strict", o.strict, "Parse definitions strictly");

  auto* bench = app.add_subcommand("benchmark", "Train/score/induce/evaluate with restarts");
  corpus_flags(bench);
  policy_flags(bench);
  training_flags(bench);
  bench->add_option("--scorer", o.scorer, "oracle | feature | external | random")
      ->check(CLI::IsMember({"oracle", "feature", "external", "random"}));
  bench->add_option("--scores-dir", o.scores_dir, "Directory of <tree_id>.json for --scorer external");
  bench->add_option("--restarts", o.restarts, "Restarts to average")->check(CLI::PositiveNumber);
  bench->add_option("--margin", o.margin, "Oracle gold-edge score");
  bench->add_option("--noise", o.noise, "Oracle noise sigma");

  auto* synth = app.add_subcommand("make-synthetic", "Generate a synthetic fixture corpus");
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--seed", o.seed, "Generator and split seed");
  synth->add_option("--trees", o.synthetic.n_trees, "Number of trees");
  synth->add_option("--min-size", o.synthetic.min_size, "Smallest tree");
  synth->add_option("--max-size", o.synthetic.max_size, "Largest tree");
  synth->add_option("--depth", o.synthetic.depth, "Tree depth");
  synth->add_option("--head-rate", o.synthetic.head_rate, "Fraction of modifier+head children");
  synth->add_option("--mention-prob", o.synthetic.mention_prob, "Glosses naming the parent");
  synth->add_option("--distractor-prob", o.synthetic.distractor_prob, "Wrong-sense glosses");
  synth->add_option("--dim", o.synthetic.dimension, "Embedding dimension");
  synth->add_option("--name", o.synthetic.name, "Corpus name / tree id prefix");
  synth->add_option("--language", o.synthetic.language, "Language code");
  synth->add_option("--fractions", o.fractions, "train dev test weights")->expected(3)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(o, out, err);
    if (*induce_cmd) return cmd_induce(o, out, err);
    if (*evaluate) return cmd_evaluate(o, out, err);
    if (*train) return cmd_train(o, out, err);
    if (*score) return cmd_score(o, out, err);
    if (*rank) return cmd_rank_defs(o, out, err);
    if (*export_cmd) return cmd_export_pairs(o, out, err);
    if (*bench) return cmd_benchmark(o, out, err);
    if (*synth) return cmd_make_synthetic(o, out, err);
  } catch (const ValidationError& e) {
    err << "error [" << e.rule() << "]: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}

}  // namespace taxoforge::cli
