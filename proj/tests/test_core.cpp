#include <random>

#include "doctest.h"
#include "taxoforge/arborescence.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/induce.hpp"
#include "test_util.hpp"

using namespace taxoforge;
using namespace taxoforge::testing;

namespace {

std::vector<Edge> named_edges(const Taxonomy& t) { return t.edges(); }

Edge e(const Taxonomy& t, const std::string& p, const std::string& c) {
  return {*t.terms().index_of(p), *t.terms().index_of(c)};
}

// Three arborescences exist on {a,b,c} rooted at a: star, a->b->c, a->c->b.
EdgeScoreMatrix chain_example() {
  return matrix_of({"a", "b", "c"}, {{"a", "b", 2}, {"a", "c", 1}, {"b", "c", 3}, {"c", "b", 0}},
                   -100.0);
}
EdgeScoreMatrix cycle_example() {
  return matrix_of({"a", "b", "c"},
                   {{"a", "b", 2}, {"a", "c", 1.5}, {"b", "c", 3}, {"c", "b", 4}}, -100.0);
}

}  // namespace

TEST_CASE("term set canonicalizes and rejects duplicates") {
  TermSet ts("x", {"  Escape_Wheel ", "Dog"});
  CHECK(ts[0] == "escape wheel");
  CHECK(ts[1] == "dog");
  CHECK(ts.index_of("dog") == 1u);
  CHECK_FALSE(ts.index_of("cat").has_value());
  CHECK_THROWS_AS(TermSet("x", {"dog", "DOG"}), ValidationError);
  CHECK_THROWS_AS(TermSet("x", {}), ValidationError);
  CHECK_THROWS_AS(TermSet("x", {" _ "}), ValidationError);
}

TEST_CASE("score matrix validation") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 3);
  try {
    EdgeScoreMatrix(TermSet("x", {"a", "b"}), s);
    FAIL("expected throw");
  } catch (const ValidationError& err) {
    CHECK(err.rule() == "dimension mismatch");
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2, 2);
  t(0, 1) = std::nan("");
  CHECK_THROWS_AS(EdgeScoreMatrix(TermSet("x", {"a", "b"}), t), ValidationError);
  t(0, 1) = 1.0;
  t(0, 0) = std::nan("");  // diagonal is never read
  EdgeScoreMatrix m(TermSet("x", {"a", "b"}), t);
  CHECK(m(0, 0) == EdgeScoreMatrix::kAbsent);
}

TEST_CASE("chu_liu_edmonds on hand examples") {
  SUBCASE("single node") {
    EdgeScoreMatrix m(TermSet("x", {"a"}), Eigen::MatrixXd::Zero(1, 1));
    const Taxonomy t = chu_liu_edmonds(m, 0);
    CHECK(t.root() == 0u);
    CHECK(t.edges().empty());
  }
  SUBCASE("no cycle") {
    const auto m = chain_example();
    const Taxonomy t = chu_liu_edmonds(m, 0);
    CHECK(named_edges(t) == std::vector<Edge>{e(t, "a", "b"), e(t, "b", "c")});
    CHECK(total_score(t, m) == 5.0);
  }
  SUBCASE("greedy choice cycles and is contracted") {
    const auto m = cycle_example();
    const Taxonomy t = chu_liu_edmonds(m, 0);
    CHECK(named_edges(t) == std::vector<Edge>{e(t, "c", "b"), e(t, "a", "c")});
    CHECK(total_score(t, m) == 5.5);
  }
}

TEST_CASE("brute force oracle on hand examples") {
  CHECK(total_score(brute_force_arborescence(chain_example(), 0), chain_example()) == 5.0);
  CHECK(total_score(brute_force_arborescence(cycle_example(), 0), cycle_example()) == 5.5);

  const auto two = matrix_of({"a", "b"}, {{"a", "b", 7}});
  const Taxonomy t2 = brute_force_arborescence(two, 0);
  CHECK(t2.edges() == std::vector<Edge>{{0, 1}});

  const auto flat = matrix_of({"a", "b", "c"}, {}, 0.25);
  const Taxonomy tf = brute_force_arborescence(flat, 0);
  CHECK(total_score(tf, flat) == 0.5);

  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(brute_force_arborescence(uniform_matrix(9, rng), 0), InvalidArgument);
}

TEST_CASE("solver matches brute force on random matrices") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const auto m = uniform_matrix(n, rng);
    for (TermIndex r = 0; r < n; ++r) {
      const Taxonomy fast = chu_liu_edmonds(m, r);
      const Taxonomy slow = brute_force_arborescence(m, r);
      REQUIRE(total_score(fast, m) == total_score(slow, m));
      CHECK(fast == slow);  // unique optimum almost surely
    }
  }
}

TEST_CASE("solver tolerates ties and still finds the optimum") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const auto m = dyadic_matrix(n, rng);
    const Taxonomy fast = chu_liu_edmonds(m, 0);
    REQUIRE(total_score(fast, m) == total_score(brute_force_arborescence(m, 0), m));
  }
}

TEST_CASE("shift invariances") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
    const auto m = dyadic_matrix(n, rng);
    const Taxonomy base = chu_liu_edmonds(m, 0);
    const double c = 0.75 * ((trial % 5) - 2);

    Eigen::MatrixXd shifted = m.scores();
    shifted.array() += c;
    const EdgeScoreMatrix global(m.terms(), shifted);
    const Taxonomy g = chu_liu_edmonds(global, 0);
    CHECK(g == base);
    CHECK(total_score(g, global) == total_score(base, m) + c * static_cast<double>(n - 1));

    const auto j = static_cast<Eigen::Index>(1 + trial % (n - 1));
    Eigen::MatrixXd col = m.scores();
    col.col(j).array() += c;
    const EdgeScoreMatrix column(m.terms(), col);
    CHECK(chu_liu_edmonds(column, 0) == base);
  }
}

TEST_CASE("solver errors") {
  const auto m = chain_example();
  CHECK_THROWS_AS(chu_liu_edmonds(m, 3), InvalidArgument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(max_spanning_arborescence(bad, 0), ValidationError);
  CHECK_THROWS_AS(max_spanning_arborescence(Eigen::MatrixXd::Zero(2, 3), 0), ValidationError);
}

TEST_CASE("templated solver works on float expressions") {
  Eigen::MatrixXf s = chain_example().scores().cast<float>();
  s.diagonal().setZero();
  const auto parent = max_spanning_arborescence(s * 2.0f, 0);
  CHECK(parent == std::vector<Eigen::Index>{-1, 0, 1});
  CHECK(arborescence_score(s, parent) == doctest::Approx(5.0f));
}

TEST_CASE("induce policies") {
  SUBCASE("best of all roots") {
    const auto m = matrix_of({"a", "b"}, {{"a", "b", 5}, {"b", "a", 1}});
    const Taxonomy t = induce(m, BestOfAllRoots{});
    CHECK(t.root() == 0u);
    CHECK(t.edges() == std::vector<Edge>{{0, 1}});
  }
  SUBCASE("best of all roots ties go to the smaller root") {
    const auto m = matrix_of({"a", "b"}, {{"a", "b", 2}, {"b", "a", 2}});
    CHECK(induce(m, BestOfAllRoots{}).root() == 0u);
  }
  SUBCASE("single node under every policy") {
    EdgeScoreMatrix m(TermSet("x", {"a"}), Eigen::MatrixXd::Zero(1, 1));
    for (const RootPolicy& p : {RootPolicy{GivenRoot{0}}, RootPolicy{BestOfAllRoots{}},
                                RootPolicy{VirtualRoot{0.0, true}}}) {
      const Taxonomy t = induce(m, p);
      CHECK(t.size() == 1u);
      CHECK(t.edges().empty());
    }
  }
  SUBCASE("given delegates to the solver") {
    const auto m = cycle_example();
    CHECK(induce(m, GivenRoot{0}) == chu_liu_edmonds(m, 0));
    CHECK_THROWS_AS(induce(m, GivenRoot{5}), InvalidArgument);
  }
  SUBCASE("virtual root with a low prior picks one child") {
    const auto m = chain_example();
    const Taxonomy t = induce(m, VirtualRoot{-1000.0, true});
    CHECK(t.root() == 0u);
    CHECK(t == chu_liu_edmonds(m, 0));
  }
  SUBCASE("virtual root with a high prior: strict throws, lenient adopts") {
    const auto m = chain_example();
    CHECK_THROWS_AS(induce(m, VirtualRoot{50.0, true}), ValidationError);
    const Taxonomy t = induce(m, VirtualRoot{50.0, false});
    CHECK(t.root() == 0u);
    CHECK(t.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
  }
  SUBCASE("invalid prior") {
    CHECK_THROWS_AS(induce(chain_example(), VirtualRoot{std::nan(""), false}), InvalidArgument);
  }
}

TEST_CASE("induce outputs are valid arborescences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
    const auto m = uniform_matrix(n, rng);
    for (const RootPolicy& p :
         {RootPolicy{GivenRoot{n - 1}}, RootPolicy{BestOfAllRoots{}}, RootPolicy{VirtualRoot{0.5, false}}}) {
      const Taxonomy t = induce(m, p);
      CHECK_NOTHROW(validate_arborescence(t.parents(), t.root()));
      CHECK(t.edges().size() == n - 1);
    }
  }
}

TEST_CASE("total_score") {
  const auto m = matrix_of({"a", "b", "c"}, {{"a", "b", 2}, {"b", "c", 3}, {"a", "c", 1}});
  CHECK(total_score(tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"b", "c"}}), m) == 5.0);
  CHECK(total_score(tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"a", "c"}}),
                    matrix_of({"a", "b", "c"}, {{"a", "b", 1}, {"a", "c", 1}})) == 2.0);
  EdgeScoreMatrix one(TermSet("x", {"a"}), Eigen::MatrixXd::Zero(1, 1));
  CHECK(total_score(tree_of({"a"}, "a", {}, "x"), one) == 0.0);
  CHECK_THROWS_AS(total_score(tree_of({"b", "a", "c"}, "a", {{"a", "b"}, {"b", "c"}}), m),
                  ValidationError);
}

TEST_CASE("ancestor pairs") {
  const Taxonomy chain = tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"b", "c"}});
  CHECK(ancestor_pairs(chain).pairs == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(ancestor_pairs(tree_of({"a"}, "a", {})).pairs.empty());
  const Taxonomy star = tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"a", "c"}});
  CHECK(ancestor_pairs(star).pairs == std::vector<Edge>{{0, 1}, {0, 2}});

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Taxonomy t = random_tree(1 + static_cast<std::size_t>(trial % 15), rng);
    std::size_t depth_sum = 0;
    for (auto d : t.depths()) depth_sum += d;
    CHECK(ancestor_pairs(t).size() == depth_sum);
  }
}

TEST_CASE("taxonomy validation rules") {
  auto rule_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& err) {
      return err.rule();
    }
    return std::string("none");
  };
  CHECK(rule_of([] { tree_of({"a", "b", "c"}, "a", {{"b", "c"}, {"c", "b"}}); }) ==
        "not an arborescence");
  CHECK(rule_of([] { tree_of({"a", "b", "c"}, "a", {{"a", "b"}}); }) == "not an arborescence");
  CHECK(rule_of([] { tree_of({"a", "b"}, "a", {{"a", "b"}, {"b", "a"}}); }) ==
        "not an arborescence");
  CHECK(rule_of([] {
          taxonomy_from_json_text(R"({"id":"x","terms":["a","b"],"root":"a","edges":[["a","z"]]})");
        }) == "unknown term");
  CHECK(rule_of([] {
          taxonomy_from_json_text(
              R"({"id":"x","terms":["a","b","c"],"root":"a","edges":[["a","b"],["c","b"]]})");
        }) == "multiple parents");
}

TEST_CASE("taxonomy json round trip") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Taxonomy t = random_tree(1 + static_cast<std::size_t>(trial % 10), rng);
    const std::string text = to_json_text(t);
    const Taxonomy back = taxonomy_from_json_text(text);
    CHECK(back == t);
    CHECK(to_json_text(back) == text);
  }
}
