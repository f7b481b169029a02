#include "taxoforge/evaluation.hpp"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/io.hpp"

namespace taxoforge {

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

PRF ancestor_prf(const Taxonomy& predicted, const Taxonomy& gold) {
  if (!predicted.terms().same_terms(gold.terms())) {
    throw ValidationError("term-set mismatch", "predicted '" + predicted.id() + "' vs gold '" +
                                                   gold.id() + "'");
  }
  // Re-index predicted pairs into gold's term order.
  std::vector<TermIndex> to_gold(predicted.size());
  for (TermIndex i = 0; i < predicted.size(); ++i) {
    to_gold[i] = *gold.terms().index_of(predicted.terms()[i]);
  }
  const AncestorSet gold_pairs = ancestor_pairs(gold);
  const AncestorSet pred_pairs = ancestor_pairs(predicted);
  std::size_t hits = 0;
  for (const auto& [a, d] : pred_pairs.pairs) {
    if (gold_pairs.contains(to_gold[a], to_gold[d])) ++hits;
  }
  PRF out;
  if (pred_pairs.size() > 0) {
    out.precision = static_cast<double>(hits) / static_cast<double>(pred_pairs.size());
  }
  if (gold_pairs.size() > 0) {
    out.recall = static_cast<double>(hits) / static_cast<double>(gold_pairs.size());
  } else {
    out.recall = pred_pairs.size() == 0 ? 1.0 : 0.0;
  }
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

EvalReport summarize(std::vector<TreeScore> per_tree) {
  if (per_tree.empty()) throw InvalidArgument("cannot evaluate an empty tree list");
  EvalReport report;
  report.n_trees = per_tree.size();
  for (const auto& t : per_tree) {
    report.macro.precision += t.prf.precision;
    report.macro.recall += t.prf.recall;
    report.macro.f1 += t.prf.f1;
  }
  const auto n = static_cast<double>(per_tree.size());
  report.macro.precision /= n;
  report.macro.recall /= n;
  report.macro.f1 /= n;
  report.per_tree = std::move(per_tree);
  return report;
}

EvalReport evaluate_set(const std::vector<std::pair<Taxonomy, Taxonomy>>& predicted_gold) {
  std::vector<TreeScore> per_tree;
  per_tree.reserve(predicted_gold.size());
  for (const auto& [pred, gold] : predicted_gold) {
    per_tree.push_back({gold.id(), ancestor_prf(pred, gold)});
  }
  return summarize(std::move(per_tree));
}

double harmonic_macro_f1(const EvalReport& report) {
  return f1_score(report.macro.precision, report.macro.recall);
}

EvalReport aggregate_restarts(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw InvalidArgument("no restart reports to aggregate");
  const auto& first = reports.front();
  std::vector<std::string> ids;
  for (const auto& t : first.per_tree) ids.push_back(t.id);
  std::vector<std::string> sorted_ids = ids;
  std::sort(sorted_ids.begin(), sorted_ids.end());

  std::vector<TreeScore> sums;
  for (const auto& id : ids) sums.push_back({id, {}});
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t k = 0; k < ids.size(); ++k) slot[ids[k]] = k;

  PRF macro;
  for (const auto& r : reports) {
    std::vector<std::string> these;
    for (const auto& t : r.per_tree) these.push_back(t.id);
    std::sort(these.begin(), these.end());
    if (these != sorted_ids) throw ValidationError("tree-id mismatch", "restart reports differ");
    for (const auto& t : r.per_tree) {
      auto& s = sums[slot.at(t.id)].prf;
      s.precision += t.prf.precision;
      s.recall += t.prf.recall;
      s.f1 += t.prf.f1;
    }
    macro.precision += r.macro.precision;
    macro.recall += r.macro.recall;
    macro.f1 += r.macro.f1;
  }
  const auto n = static_cast<double>(reports.size());
  for (auto& s : sums) {
    s.prf.precision /= n;
    s.prf.recall /= n;
    s.prf.f1 /= n;
  }
  EvalReport out;
  out.per_tree = std::move(sums);
  out.n_trees = out.per_tree.size();
  out.macro = {macro.precision / n, macro.recall / n, macro.f1 / n};
  return out;
}

namespace {

nlohmann::ordered_json metrics_json(const PRF& m) {
  return {{"P", round_half_even(m.precision, 6)},
          {"R", round_half_even(m.recall, 6)},
          {"F1", round_half_even(m.f1, 6)}};
}

PRF metrics_from_json(const nlohmann::json& j) {
  for (const char* k : {"P", "R", "F1"}) {
    if (!j.contains(k) || !j[k].is_number()) {
      throw ValidationError("malformed report", std::string("missing metric '") + k + "'");
    }
  }
  return {j["P"].get<double>(), j["R"].get<double>(), j["F1"].get<double>()};
}

}  // namespace

std::string report_to_json_text(const EvalReport& report) {
  nlohmann::ordered_json per_tree = nlohmann::ordered_json::array();
  for (const auto& t : report.per_tree) {
    nlohmann::ordered_json entry = {{"id", t.id}};
    const nlohmann::ordered_json metrics = metrics_json(t.prf);
    for (const auto& [k, v] : metrics.items()) entry[k] = v;
    per_tree.push_back(std::move(entry));
  }
  nlohmann::ordered_json doc = {{"macro", metrics_json(report.macro)},
                                {"n_trees", report.n_trees},
                                {"per_tree", std::move(per_tree)}};
  return doc.dump(2) + "\n";
}

EvalReport report_from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed report", e.what());
  }
  if (!doc.is_object() || !doc.contains("macro") || !doc.contains("n_trees") ||
      !doc["n_trees"].is_number_unsigned() || !doc.contains("per_tree") ||
      !doc["per_tree"].is_array()) {
    throw ValidationError("malformed report", "expected macro, n_trees and per_tree");
  }
  EvalReport report;
  report.macro = metrics_from_json(doc["macro"]);
  report.n_trees = doc["n_trees"].get<std::size_t>();
  for (const auto& t : doc["per_tree"]) {
    if (!t.is_object() || !t.contains("id") || !t["id"].is_string()) {
      throw ValidationError("malformed report", "per_tree entry needs a string id");
    }
    report.per_tree.push_back({t["id"].get<std::string>(), metrics_from_json(t)});
  }
  if (report.per_tree.size() != report.n_trees) {
    throw ValidationError("malformed report", "n_trees does not match per_tree length");
  }
  return report;
}

}  // namespace taxoforge
