#include "taxoforge/score_matrix.hpp"

#include <cmath>
#include <cstring>

#include "json.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/io.hpp"

namespace taxoforge {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

EdgeScoreMatrix::EdgeScoreMatrix(TermSet terms, Eigen::MatrixXd scores)
    : terms_(std::move(terms)), scores_(std::move(scores)) {
  const auto n = static_cast<Eigen::Index>(terms_.size());
  if (scores_.rows() != n || scores_.cols() != n) {
    throw ValidationError("dimension mismatch",
                          terms_.id() + ": " + std::to_string(terms_.size()) + " terms but " +
                              std::to_string(scores_.rows()) + "x" +
                              std::to_string(scores_.cols()) + " scores");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && !std::isfinite(scores_(i, j))) {
        throw ValidationError("non-finite score", terms_.id() + ": entry [" + std::to_string(i) +
                                                      "][" + std::to_string(j) + "]");
      }
    }
    scores_(i, i) = kAbsent;
  }
}

bool operator==(const EdgeScoreMatrix& a, const EdgeScoreMatrix& b) {
  if (!(a.terms_ == b.terms_)) return false;
  const auto n = a.scores_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double x = a.scores_(i, j);
      const double y = b.scores_(i, j);
      if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
    }
  }
  return true;
}

std::string to_json_text(const EdgeScoreMatrix& m) {
  ojson rows = ojson::array();
  const auto n = static_cast<Eigen::Index>(m.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        row.push_back(nullptr);
      } else {
        row.push_back(m.scores()(i, j));
      }
    }
    rows.push_back(std::move(row));
  }
  ojson doc = {{"tree_id", m.tree_id()}, {"terms", m.terms().terms()}, {"scores", std::move(rows)}};
  return doc.dump() + "\n";
}

EdgeScoreMatrix score_matrix_from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    if (has_non_finite_literal(text)) throw ValidationError("non-finite score", "NaN/Inf literal");
    throw ValidationError("malformed file", e.what());
  }
  if (!doc.is_object() || !doc.contains("tree_id") || !doc["tree_id"].is_string() ||
      !doc.contains("terms") || !doc["terms"].is_array() || !doc.contains("scores") ||
      !doc["scores"].is_array()) {
    throw ValidationError("malformed file", "expected {\"tree_id\", \"terms\", \"scores\"}");
  }
  std::vector<std::string> terms;
  for (const auto& t : doc["terms"]) {
    if (!t.is_string()) throw ValidationError("malformed file", "terms must be strings");
    terms.push_back(t.get<std::string>());
  }
  TermSet term_set(doc["tree_id"].get<std::string>(), terms);
  const auto& rows = doc["scores"];
  const std::size_t n = terms.size();
  if (rows.size() != n) {
    throw ValidationError("dimension mismatch", term_set.id() + ": " + std::to_string(n) +
                                                    " terms but " + std::to_string(rows.size()) +
                                                    " score rows");
  }
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != n) {
      throw ValidationError("dimension mismatch",
                            term_set.id() + ": row " + std::to_string(i) + " has wrong length");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto& v = row[j];
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (i == j) {
        if (!v.is_null()) {
          throw ValidationError("non-null diagonal",
                                term_set.id() + ": scores[" + std::to_string(i) + "][" +
                                    std::to_string(i) + "]");
        }
        scores(ii, jj) = EdgeScoreMatrix::kAbsent;
        continue;
      }
      if (!v.is_number()) {
        throw ValidationError("missing score", term_set.id() + ": scores[" + std::to_string(i) +
                                                   "][" + std::to_string(j) + "]");
      }
      scores(ii, jj) = v.get<double>();
    }
  }
  return EdgeScoreMatrix(std::move(term_set), std::move(scores));
}

void write_score_matrix(const EdgeScoreMatrix& m, const std::filesystem::path& path) {
  write_file(path, to_json_text(m));
}

EdgeScoreMatrix load_external_matrix(const std::filesystem::path& path,
                                     const std::optional<TermSet>& expected) {
  EdgeScoreMatrix m = [&] {
    try {
      return score_matrix_from_json_text(read_file(path));
    } catch (const ValidationError& e) {
      throw ValidationError::at(path.string(), e);
    }
  }();
  if (expected && m.terms().terms() != expected->terms()) {
    throw ValidationError("term mismatch", path.string() + ": terms differ from tree '" +
                                               expected->id() + "'");
  }
  return m;
}

}  // namespace taxoforge
