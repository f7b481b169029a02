#include <random>
#include <set>

#include "doctest.h"
#include "taxoforge/error.hpp"
#include "taxoforge/evaluation.hpp"
#include "test_util.hpp"

using namespace taxoforge;
using namespace taxoforge::testing;

namespace {

// Reference closure: walk parent pointers by term name.
std::set<std::pair<std::string, std::string>> closure(const Taxonomy& t) {
  std::set<std::pair<std::string, std::string>> out;
  const auto& terms = t.terms().terms();
  for (std::size_t c = 0; c < terms.size(); ++c) {
    for (auto p = t.parent(c); p != Taxonomy::kNoParent; p = t.parent(p)) out.emplace(terms[p], terms[c]);
  }
  return out;
}

PRF reference_prf(const Taxonomy& pred, const Taxonomy& gold) {
  const auto a = closure(pred), g = closure(gold);
  std::size_t hit = 0;
  for (const auto& e : a) hit += g.count(e);
  const double p = a.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(a.size());
  const double r = g.empty() ? (a.empty() ? 1.0 : 0.0) : static_cast<double>(hit) / static_cast<double>(g.size());
  return {p, r, p + r == 0 ? 0.0 : 2 * p * r / (p + r)};
}

Taxonomy shuffled_copy(const Taxonomy& t, std::mt19937_64& rng, const std::string& id) {
  auto terms = t.terms().terms();
  std::shuffle(terms.begin(), terms.end(), rng);
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& [p, c] : t.edges()) edges.emplace_back(t.terms().terms()[p], t.terms().terms()[c]);
  return tree_of(terms, t.terms().terms()[t.root()], edges, id);
}

}  // namespace

TEST_CASE("ancestor_prf examples") {
  const auto chain = tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"b", "c"}}, "x");
  const auto star = tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"a", "c"}}, "x");
  const auto s = ancestor_prf(star, chain);
  CHECK(s.precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.f1 == doctest::Approx(0.8).epsilon(1e-12));
  const auto r = ancestor_prf(chain, star);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == doctest::Approx(0.8).epsilon(1e-12));

  CHECK(ancestor_prf(chain, chain) == PRF{1.0, 1.0, 1.0});
  const auto single = tree_of({"a"}, "a", {});
  CHECK(ancestor_prf(single, single) == PRF{0.0, 1.0, 0.0});

  const auto other = tree_of({"a", "b", "d"}, "a", {{"a", "b"}, {"b", "d"}}, "x");
  CHECK_THROWS_AS(ancestor_prf(other, chain), ValidationError);
  CHECK(f1_score(0.0, 0.0) == 0.0);
}

TEST_CASE("ancestor_prf matches reference and is order independent") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 12);
    const Taxonomy gold = random_tree(n, rng, "g");
    const Taxonomy pred = shuffled_copy(random_tree(n, rng, "p"), rng, "p");
    const PRF got = ancestor_prf(pred, gold);
    const PRF want = reference_prf(pred, gold);
    CHECK(got.precision == doctest::Approx(want.precision).epsilon(1e-12));
    CHECK(got.recall == doctest::Approx(want.recall).epsilon(1e-12));
    CHECK(got.f1 == doctest::Approx(want.f1).epsilon(1e-12));

    // swapping roles swaps P and R
    const PRF back = ancestor_prf(gold, pred);
    CHECK(back.precision == doctest::Approx(got.recall).epsilon(1e-12));
    CHECK(back.recall == doctest::Approx(got.precision).epsilon(1e-12));
    for (double v : {got.precision, got.recall, got.f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(ancestor_prf(shuffled_copy(gold, rng, "g2"), gold) == PRF{1.0, 1.0, 1.0});
  }
}

TEST_CASE("macro averaging") {
  const auto report = summarize({{"x", {1.0, 0.5, f1_score(1.0, 0.5)}},
                                 {"y", {0.5, 1.0, f1_score(0.5, 1.0)}}});
  CHECK(report.n_trees == 2u);
  CHECK(report.macro.precision == 0.75);
  CHECK(report.macro.recall == 0.75);
  CHECK(report.macro.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(harmonic_macro_f1(report) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_AS(summarize({}), InvalidArgument);
}

TEST_CASE("evaluate_set uses gold ids") {
  const auto chain = tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"b", "c"}}, "gold-id");
  const auto star = tree_of({"a", "b", "c"}, "a", {{"a", "b"}, {"a", "c"}}, "pred-id");
  const auto r = evaluate_set({{star, chain}, {chain, chain}});
  REQUIRE(r.per_tree.size() == 2u);
  CHECK(r.per_tree[0].id == "gold-id");
  CHECK(r.macro.f1 == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("aggregate_restarts") {
  const auto a = summarize({{"x", {1.0, 0.5, 0.6}}, {"y", {0.0, 0.0, 0.0}}});
  const auto b = summarize({{"x", {0.5, 0.5, 0.4}}, {"y", {1.0, 1.0, 1.0}}});
  const auto m = aggregate_restarts({a, b});
  CHECK(m.per_tree[0] == TreeScore{"x", {0.75, 0.5, 0.5}});
  CHECK(m.per_tree[1] == TreeScore{"y", {0.5, 0.5, 0.5}});
  CHECK(m.macro.f1 == doctest::Approx(0.5));
  CHECK(aggregate_restarts({a}) == a);
  const auto c = summarize({{"x", {1, 1, 1}}, {"z", {1, 1, 1}}});
  CHECK_THROWS_AS(aggregate_restarts({a, c}), ValidationError);
}

TEST_CASE("report json") {
  const auto r = summarize({{"x", {1.0, 2.0 / 3.0, 0.8}}, {"y", {0.1234565, 0.1234575, 0.5}}});
  const std::string text = report_to_json_text(r);
  CHECK(text.back() == '\n');
  CHECK(text.find("0.666667") != std::string::npos);
  const auto back = report_from_json_text(text);
  CHECK(back.n_trees == 2u);
  CHECK(back.per_tree[0].id == "x");
  CHECK(back.per_tree[0].prf.recall == 0.666667);
  CHECK(report_to_json_text(back) == text);
  CHECK_THROWS_AS(report_from_json_text("{"), ValidationError);
}
