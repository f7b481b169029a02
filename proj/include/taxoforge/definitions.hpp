#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "taxoforge/term_set.hpp"

namespace taxoforge {

/// One gloss for a term. `relevance` is filled in by re-ranking.
struct DefinitionRecord {
  std::string term;
  std::string source;
  std::string text;
  double relevance = 0.0;

  friend bool operator==(const DefinitionRecord&, const DefinitionRecord&) = default;
};

/// Definitions keyed by canonical term, in rank order.
class DefinitionStore {
 public:
  /// Canonicalizes the term; drops exact (term, source, text) duplicates.
  /// Returns false if the record was a duplicate.
  bool add(DefinitionRecord record);

  /// Replaces a term's list (used for re-ranked lists).
  void set(const std::string& term, std::vector<DefinitionRecord> records);

  /// Empty list for unknown terms.
  const std::vector<DefinitionRecord>& lookup(std::string_view term) const;

  bool empty() const noexcept { return by_term_.empty(); }
  std::size_t term_count() const noexcept { return by_term_.size(); }
  const std::map<std::string, std::vector<DefinitionRecord>, std::less<>>& entries() const noexcept {
    return by_term_;
  }

 private:
  std::map<std::string, std::vector<DefinitionRecord>, std::less<>> by_term_;
};

struct DefinitionsLoad {
  DefinitionStore store;
  std::vector<std::string> warnings;  // lenient mode: one per skipped line
};

/// Reads the definitions JSONL format. Strict mode throws on the first
/// malformed line (message carries the line number); lenient mode skips it.
DefinitionsLoad parse_definitions(std::string_view text, const std::string& source_name,
                                  bool strict = true);
DefinitionsLoad load_definitions(const std::filesystem::path& path, bool strict = true);

/// One line per term, terms in sorted order.
std::string definitions_to_jsonl(const DefinitionStore& store, const std::string& language);

/// Word vectors. All vectors share `dimension()`.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(Eigen::Index dimension) : dimension_(dimension) {}

  Eigen::Index dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool empty() const noexcept { return vectors_.empty(); }

  /// First insertion of a token wins. Throws on wrong dimension or a
  /// non-finite entry.
  void add(const std::string& token, Eigen::VectorXd vector);

  /// nullptr when absent.
  const Eigen::VectorXd* find(std::string_view token) const;

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  Eigen::Index dimension_ = 0;
  std::vector<std::string> tokens_;
  std::vector<Eigen::VectorXd> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Text embedding format: optional "count dim" header line, then
/// "token v1 ... vdim" per line.
EmbeddingTable parse_embeddings(std::string_view text, const std::string& source_name);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
std::string embeddings_to_text(const EmbeddingTable& table);

using StopwordSet = std::unordered_set<std::string>;

StopwordSet parse_stopwords(std::string_view text);
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Built-in list for "en" or "fi"; empty for other languages.
StopwordSet bundled_stopwords(std::string_view language);

/// Mean vector of in-vocabulary, non-stopword tokens (canonicalized first).
/// Zero vector of the table's dimension when nothing remains.
Eigen::VectorXd avg_embedding(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                              const StopwordSet& stopwords);

/// Cosine similarity; 0 when either side is a zero vector.
template <typename A, typename B>
double cosine_similarity(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() == 0 || a.size() != b.size()) return 0.0;
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

/// Tokens of every term in the set, concatenated.
std::vector<std::string> term_set_tokens(const TermSet& terms);

/// The term's definitions with `relevance` set to the cosine between the
/// definition's average embedding and the whole term set's, stably sorted by
/// descending relevance.
std::vector<DefinitionRecord> rerank_definitions(std::string_view term, const DefinitionStore& store,
                                                 const TermSet& term_set,
                                                 const EmbeddingTable& table,
                                                 const StopwordSet& stopwords);

/// Re-ranked store restricted to the terms of `term_set`.
DefinitionStore rerank_store(const DefinitionStore& store, const TermSet& term_set,
                             const EmbeddingTable& table, const StopwordSet& stopwords);

struct ContextLimits {
  std::size_t max_defs = 3;
  std::size_t max_chars = 512;  // code points of the joined definitions
};

/// "term def1, def2 ." using whole definitions only; "term ." when none fit.
std::string term_context(std::string_view term, const DefinitionStore& store,
                         const ContextLimits& limits = {});

/// (parent_context, child_context).
std::pair<std::string, std::string> build_pair_context(std::string_view parent,
                                                       std::string_view child,
                                                       const DefinitionStore& store,
                                                       const ContextLimits& limits = {});

}  // namespace taxoforge
