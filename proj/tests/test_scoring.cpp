#include <random>

#include "doctest.h"
#include "taxoforge/error.hpp"
#include "taxoforge/induce.hpp"
#include "taxoforge/scorer.hpp"
#include "test_util.hpp"

using namespace taxoforge;
using namespace taxoforge::testing;

namespace {

Taxonomy star() { return tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"a", "c"}}, "star"); }

std::vector<Taxonomy> toy_trees(int count, int offset) {
  std::vector<Taxonomy> out;
  for (int k = offset; k < offset + count; ++k) {
    const std::string h = "head" + std::to_string(k);
    const std::string x = "other" + std::to_string(k);
    out.push_back(tree_of({h, "big " + h, x, "tiny " + x, "loose" + std::to_string(k)}, h,
                          {{h, "big " + h}, {h, x}, {x, "tiny " + x}, {h, "loose" + std::to_string(k)}},
                          "toy" + std::to_string(k)));
  }
  return out;
}

}  // namespace

TEST_CASE("make_hypothesis") {
  CHECK(make_hypothesis("mammal", "dog") == "A dog is a mammal.");
  CHECK(make_hypothesis("b", "a", "{child}|{parent}") == "a|b");
  CHECK(make_hypothesis("escape wheel", "balance wheel") == "A balance wheel is a escape wheel.");
  CHECK(make_hypothesis("Escape_Wheel", " Dog ") == "A dog is a escape wheel.");
  CHECK_THROWS_AS(make_hypothesis("a", "b", "{child} only"), InvalidArgument);
  CHECK_THROWS_AS(make_hypothesis("a", "b", "only {parent}"), InvalidArgument);
}

TEST_CASE("oracle_scores") {
  const Taxonomy chain = tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"b", "c"}});
  const auto m = oracle_scores(chain, 1.0, 0.0, 0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 2) == 1.0);
  CHECK(m(0, 2) == 0.0);
  CHECK(m(1, 0) == 0.0);
  CHECK(m(2, 0) == 0.0);
  CHECK(m(2, 1) == 0.0);

  CHECK(oracle_scores(chain, 1.0, 0.1, 17) == oracle_scores(chain, 1.0, 0.1, 17));
  CHECK_FALSE(oracle_scores(chain, 1.0, 0.1, 17) == oracle_scores(chain, 1.0, 0.1, 18));
  CHECK_THROWS_AS(oracle_scores(chain, 0.0, 0.0, 0), InvalidArgument);
  CHECK_THROWS_AS(oracle_scores(chain, -1.0, 0.0, 0), InvalidArgument);
}

TEST_CASE("oracle recovery for random trees") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Taxonomy gold = random_tree(1 + static_cast<std::size_t>(trial % 30), rng);
    const Taxonomy got = induce(oracle_scores(gold, 1.0, 0.0, 0), GivenRoot{gold.root()});
    CHECK(got == gold);
  }
}

TEST_CASE("generate_training_pairs") {
  SUBCASE("all negatives") {
    const auto pairs = generate_training_pairs({star()}, {}, AllNegatives{});
    REQUIRE(pairs.size() == 6u);
    std::vector<std::pair<std::string, std::string>> pos, neg;
    for (const auto& p : pairs) (p.label ? pos : neg).emplace_back(p.parent, p.child);
    using P = std::pair<std::string, std::string>;
    CHECK(pos == std::vector<P>{{"a", "b"}, {"a", "c"}});
    CHECK(neg == std::vector<P>{{"b", "a"}, {"b", "c"}, {"c", "a"}, {"c", "b"}});
    for (const auto& p : pairs) {
      CHECK(p.parent_context.empty());
      CHECK(p.child_context.empty());
      CHECK(p.tree_id == "star");
    }
  }
  SUBCASE("single node") {
    CHECK(generate_training_pairs({tree_of({"a"}, "a", {})}, {}, AllNegatives{}).empty());
    CHECK(generate_training_pairs({tree_of({"a"}, "a", {})}, {}, SampledNegatives{1, 3}).empty());
  }
  SUBCASE("sampled") {
    const auto a = generate_training_pairs({star()}, {}, SampledNegatives{1, 42});
    const auto b = generate_training_pairs({star()}, {}, SampledNegatives{1, 42});
    CHECK(a == b);
    int pos = 0;
    for (const auto& p : a) pos += p.label;
    CHECK(pos == 2);
    CHECK(a.size() == 4u);
    CHECK_THROWS_AS(generate_training_pairs({star()}, {}, SampledNegatives{3, 1}), InvalidArgument);
  }
  SUBCASE("contexts come from ranked definitions") {
    RankedDefinitions defs;
    defs["star"].add({"a", "wiki", "a canine", 0.0});
    const auto pairs = generate_training_pairs({star()}, defs, AllNegatives{});
    CHECK(pairs[0].parent == "a");
    CHECK(pairs[0].parent_context == "a a canine .");
    CHECK(pairs[0].child_context.empty());
  }
}

TEST_CASE("pair export record") {
  const PairExample p{"t", "mammal", "dog", 1, "", "dog a canine ."};
  CHECK(pair_to_json_text(p) ==
        R"({"tree_id":"t","parent":"mammal","child":"dog","label":1,"hypothesis":"A dog is a mammal.","parent_context":"","child_context":"dog a canine ."})");
}

TEST_CASE("featurize") {
  const DefinitionStore none;
  const EmbeddingTable empty;
  SUBCASE("string rules") {
    const auto f = featurize("wheel", "escape wheel", none, empty);
    CHECK(f(0) == 1.0);
    CHECK(f(1) == 1.0);
    CHECK(f(2) == doctest::Approx(0.5));
    const auto r = featurize("escape wheel", "wheel", none, empty);
    CHECK(r(0) == 1.0);
    CHECK(r(1) == 0.0);  // containment is directional
  }
  SUBCASE("graceful degradation") {
    const auto f = featurize("x", "y", none, empty);
    CHECK(f(3) == 0.0);
    CHECK(f(4) == 0.0);
    CHECK(f(5) == 0.0);
    CHECK(f(6) == 0.0);  // shorter than a 4-gram
  }
  SUBCASE("definition mention") {
    DefinitionStore defs;
    defs.add({"dish", "wiktionary", "a type of antenna with a similar shape to a plate or bowl", 0});
    CHECK(featurize("antenna", "dish", defs, empty)(5) == 1.0);
    CHECK(featurize("plate", "dish", defs, empty)(5) == 1.0);
    CHECK(featurize("bowl shape", "dish", defs, empty)(5) == 0.0);
    CHECK(featurize("dish", "antenna", defs, empty)(5) == 0.0);
  }
  SUBCASE("embedding features") {
    EmbeddingTable table;
    table.add("dog", Eigen::Vector2d(1, 0));
    table.add("canine", Eigen::Vector2d(1, 1));
    table.add("mammal", Eigen::Vector2d(0, 1));
    DefinitionStore defs;
    defs.add({"dog", "w", "a domestic canine", 0});
    const auto f = featurize("mammal", "dog", defs, table, bundled_stopwords("en"));
    CHECK(f(3) == doctest::Approx(0.0));
    CHECK(f(4) == doctest::Approx(std::sqrt(0.5)));
  }
  SUBCASE("char 4-gram dice") {
    // "wheel": whee, heel; "wheels": whee, heel, eels -> 2*2/5
    CHECK(featurize("wheel", "wheels", none, empty)(6) == doctest::Approx(0.8));
  }
  SUBCASE("bounded") {
    const auto f = featurize("A b c", "c b a d", none, empty);
    CHECK(f.maxCoeff() <= 1.0);
    CHECK(f.minCoeff() >= -1.0);
  }
}

TEST_CASE("logistic gradient matches central differences") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Index n = 40, d = kFeatureCount + 1;
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d - 1; ++j) x(i, j) = u(rng);
    x(i, d - 1) = 1.0;
    y(i) = (i % 3 == 0) ? 1.0 : 0.0;
  }
  for (int point = 0; point < 20; ++point) {
    Eigen::VectorXd w(d);
    for (Eigen::Index j = 0; j < d; ++j) w(j) = 2.0 * g(rng);
    const Eigen::VectorXd analytic = logistic_gradient(x, y, w, 0.01);
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::VectorXd wp = w, wm = w;
      wp(j) += h;
      wm(j) -= h;
      const double numeric = (logistic_loss(x, y, wp, 0.01) - logistic_loss(x, y, wm, 0.01)) / (2 * h);
      const double rel = std::fabs(numeric - analytic(j)) / std::max(1e-8, std::fabs(numeric) + std::fabs(analytic(j)));
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("training on a separable toy set") {
  const auto trees = toy_trees(6, 0);
  const auto pairs = generate_training_pairs(trees, {}, AllNegatives{});
  const EmbeddingTable table;
  std::vector<double> trace;
  const auto model = train_feature_scorer(pairs, {}, table, {}, {0.5, 400, 1e-4, 3}, &trace);

  SUBCASE("loss trace") {
    REQUIRE(trace.size() == 401u);
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1]);
    CHECK(model.final_loss == trace.back());
    CHECK(trace.back() < trace.front());
  }
  SUBCASE("determinism") {
    const auto again = train_feature_scorer(pairs, {}, table, {}, {0.5, 400, 1e-4, 3});
    CHECK(again == model);
  }
  SUBCASE("degenerate labels") {
    std::vector<PairExample> only_pos;
    for (const auto& p : pairs) {
      if (p.label) only_pos.push_back(p);
    }
    CHECK_THROWS_AS(train_feature_scorer(only_pos, {}, table, {}, {}), InvalidArgument);
  }
}

TEST_CASE("feature scorer learns head-word regularity") {
  std::vector<Taxonomy> train;
  for (int k = 0; k < 5; ++k) {
    const std::string h = "w" + std::to_string(k);
    train.push_back(tree_of({h, "x " + h, "y x " + h, "z " + h}, h,
                            {{h, "x " + h}, {"x " + h, "y x " + h}, {h, "z " + h}},
                            "sep" + std::to_string(k)));
  }
  // h -> "y x h" also matches head and containment but has lower Jaccard
  // overlap than any gold edge, so the set stays linearly separable.
  const auto pairs = generate_training_pairs(train, {}, AllNegatives{});
  const EmbeddingTable table;
  const auto model = train_feature_scorer(pairs, {}, table, {}, {0.5, 2000, 0.0, 1});
  const Eigen::MatrixXd x = design_matrix(pairs, {}, table, {});
  int correct = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double z = x.row(static_cast<Eigen::Index>(k)).dot(model.weights);
    correct += ((z > 0) == (pairs[k].label == 1)) ? 1 : 0;
  }
  CHECK(correct == static_cast<int>(pairs.size()));

  const Taxonomy held = tree_of({"q", "m q", "n m q", "o q"}, "q",
                                {{"q", "m q"}, {"m q", "n m q"}, {"q", "o q"}}, "held");
  const auto m = predict_matrix(model, held.terms(), {}, table, {});
  CHECK(induce(m, GivenRoot{held.root()}) == held);
  CHECK(induce(m, BestOfAllRoots{}) == held);
}

TEST_CASE("predict_matrix") {
  FeatureScorerModel zero;
  zero.feature_spec = feature_names();
  zero.weights = Eigen::VectorXd::Zero(kFeatureCount + 1);
  zero.weights(kFeatureCount) = -0.25;
  const auto m = predict_matrix(zero, TermSet("t", {"a", "b", "c"}), {}, {}, {});
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(m.scores()(i, j) == (i == j ? EdgeScoreMatrix::kAbsent : -0.25));
  }
  const auto one = predict_matrix(zero, TermSet("t", {"a"}), {}, {}, {});
  CHECK(one.size() == 1u);
  CHECK(one(0, 0) == EdgeScoreMatrix::kAbsent);

  FeatureScorerModel bad = zero;
  bad.feature_spec.back() = "something_else";
  CHECK_THROWS_AS(predict_matrix(bad, TermSet("t", {"a", "b"}), {}, {}, {}), ValidationError);
}

TEST_CASE("model text round trip is bit exact") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureScorerModel m;
    m.feature_spec = feature_names();
    m.weights.resize(kFeatureCount + 1);
    for (Eigen::Index k = 0; k < m.weights.size(); ++k) m.weights(k) = g(rng) / 7.0;
    m.training = {g(rng), trial, 1e-3 / 3.0, rng()};
    m.final_loss = std::fabs(g(rng));
    const std::string text = model_to_text(m);
    const auto back = model_from_text(text);
    CHECK(back == m);
    CHECK(model_to_text(back) == text);
  }
  CHECK_THROWS_AS(model_from_text("not a model\n"), ValidationError);
  CHECK_THROWS_AS(model_from_text("taxoforge-feature-model 1\nfeatures a\nseed x\n"), ValidationError);
}
