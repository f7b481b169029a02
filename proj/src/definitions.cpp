#include "taxoforge/definitions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/io.hpp"
#include "taxoforge/text.hpp"

namespace taxoforge {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

bool DefinitionStore::add(DefinitionRecord record) {
  record.term = canonicalize_term(record.term);
  auto& list = by_term_[record.term];
  const bool dup = std::any_of(list.begin(), list.end(), [&](const DefinitionRecord& r) {
    return r.source == record.source && r.text == record.text;
  });
  if (dup) return false;
  list.push_back(std::move(record));
  return true;
}

void DefinitionStore::set(const std::string& term, std::vector<DefinitionRecord> records) {
  by_term_[canonicalize_term(term)] = std::move(records);
}

const std::vector<DefinitionRecord>& DefinitionStore::lookup(std::string_view term) const {
  static const std::vector<DefinitionRecord> kEmpty;
  auto it = by_term_.find(term);
  return it == by_term_.end() ? kEmpty : it->second;
}

namespace {

std::vector<DefinitionRecord> parse_definition_line(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed line", e.what());
  }
  if (!doc.is_object() || !doc.contains("term") || !doc["term"].is_string()) {
    throw ValidationError("malformed line", "missing string field 'term'");
  }
  if (doc.contains("language") && !doc["language"].is_string()) {
    throw ValidationError("malformed line", "field 'language' must be a string");
  }
  if (!doc.contains("definitions") || !doc["definitions"].is_array()) {
    throw ValidationError("malformed line", "missing array field 'definitions'");
  }
  const std::string term = canonicalize_term(doc["term"].get<std::string>());
  if (term.empty()) throw ValidationError("malformed line", "empty term");
  std::vector<DefinitionRecord> out;
  for (const auto& d : doc["definitions"]) {
    if (!d.is_object() || !d.contains("source") || !d["source"].is_string() ||
        !d.contains("text") || !d["text"].is_string()) {
      throw ValidationError("malformed line", "definition needs string 'source' and 'text'");
    }
    std::string text = trim(d["text"].get<std::string>());
    if (text.empty()) throw ValidationError("malformed line", "empty definition text");
    out.push_back({term, d["source"].get<std::string>(), std::move(text), 0.0});
  }
  return out;
}

}  // namespace

DefinitionsLoad parse_definitions(std::string_view text, const std::string& source_name,
                                  bool strict) {
  DefinitionsLoad result;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      for (auto& rec : parse_definition_line(line)) result.store.add(std::move(rec));
    } catch (const ValidationError& e) {
      auto located = ValidationError::at(source_name + ":" + std::to_string(line_no), e);
      if (strict) throw located;
      result.warnings.emplace_back(located.what());
    }
  }
  return result;
}

DefinitionsLoad load_definitions(const std::filesystem::path& path, bool strict) {
  return parse_definitions(read_file(path), path.string(), strict);
}

std::string definitions_to_jsonl(const DefinitionStore& store, const std::string& language) {
  std::string out;
  for (const auto& [term, records] : store.entries()) {
    ojson defs = ojson::array();
    for (const auto& r : records) defs.push_back({{"source", r.source}, {"text", r.text}});
    ojson doc = {{"term", term}, {"language", language}, {"definitions", std::move(defs)}};
    out += doc.dump();
    out += '\n';
  }
  return out;
}

void EmbeddingTable::add(const std::string& token, Eigen::VectorXd vector) {
  if (dimension_ == 0 && vectors_.empty()) dimension_ = vector.size();
  if (vector.size() != dimension_ || dimension_ == 0) {
    throw ValidationError("dimension mismatch", "vector for '" + token + "' has dimension " +
                                                    std::to_string(vector.size()) + ", expected " +
                                                    std::to_string(dimension_));
  }
  if (!vector.allFinite()) throw ValidationError("non-finite value", "vector for '" + token + "'");
  const std::string key = to_lower(token);
  if (index_.count(key)) return;
  index_.emplace(key, vectors_.size());
  tokens_.push_back(key);
  vectors_.push_back(std::move(vector));
}

const Eigen::VectorXd* EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) out.push_back(field);
  return out;
}

bool is_unsigned_integer(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

EmbeddingTable parse_embeddings(std::string_view text, const std::string& source_name) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  EmbeddingTable table;
  Eigen::Index dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (line_no == 1 && fields.size() == 2 && is_unsigned_integer(fields[0]) &&
        is_unsigned_integer(fields[1])) {
      dim = std::stol(fields[1]);
      table = EmbeddingTable(dim);
      continue;
    }
    if (fields.size() < 2) throw ValidationError("malformed line", where + ": no vector values");
    if (dim == 0) {
      dim = static_cast<Eigen::Index>(fields.size() - 1);
      table = EmbeddingTable(dim);
    }
    if (static_cast<Eigen::Index>(fields.size() - 1) != dim) {
      throw ValidationError("dimension mismatch", where + ": expected " + std::to_string(dim) +
                                                      " values, got " +
                                                      std::to_string(fields.size() - 1));
    }
    Eigen::VectorXd v(dim);
    try {
      for (Eigen::Index k = 0; k < dim; ++k) {
        v(k) = parse_double(fields[static_cast<std::size_t>(k) + 1]);
      }
      table.add(fields[0], std::move(v));
    } catch (const ValidationError& e) {
      throw ValidationError::at(where, e);
    }
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path), path.string());
}

std::string embeddings_to_text(const EmbeddingTable& table) {
  std::string out = std::to_string(table.size()) + " " + std::to_string(table.dimension()) + "\n";
  for (const auto& token : table.tokens()) {
    out += token;
    for (double x : *table.find(token)) {
      out += ' ';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

StopwordSet parse_stopwords(std::string_view text) {
  StopwordSet out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string w = to_lower(trim(line));
    if (!w.empty() && w[0] != '#') out.insert(std::move(w));
  }
  return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  return parse_stopwords(read_file(path));
}

StopwordSet bundled_stopwords(std::string_view language) {
  static constexpr const char* kEnglish[] = {
      "a",     "about", "above",  "after",   "again",  "against", "all",   "am",    "an",
      "and",   "any",   "are",    "as",      "at",     "be",      "because", "been", "before",
      "being", "below", "between", "both",   "but",    "by",      "can",   "could", "did",
      "do",    "does",  "doing",  "down",    "during", "each",    "few",   "for",   "from",
      "further", "had", "has",    "have",    "having", "he",      "her",   "here",  "hers",
      "herself", "him", "himself", "his",    "how",    "i",       "if",    "in",    "into",
      "is",    "it",    "its",    "itself",  "just",   "me",      "more",  "most",  "my",
      "myself", "no",   "nor",    "not",     "now",    "of",      "off",   "on",    "once",
      "one",   "only",  "or",     "other",   "our",    "ours",    "ourselves", "out", "over",
      "own",   "same",  "she",    "should",  "so",     "some",    "such",  "than",  "that",
      "the",   "their", "theirs", "them",    "themselves", "then", "there", "these", "they",
      "this",  "those", "through", "to",     "too",    "under",   "until", "up",    "used",
      "very",  "was",   "we",     "were",    "what",   "when",    "where", "which", "while",
      "who",   "whom",  "why",    "will",    "with",   "would",   "you",   "your",  "yours",
      "yourself", "yourselves"};
  static constexpr const char* kFinnish[] = {
      "ja",   "on",   "ei",    "se",    "että",  "oli",   "ovat",  "olla",  "joka",  "jotka",
      "kuin", "tai",  "mutta", "myös",  "niin",  "sekä",  "jos",   "kun",   "jo",    "vain",
      "hän",  "he",   "me",    "te",    "minä",  "sinä",  "tämä",  "nämä",  "tuo",   "nuo",
      "sen",  "sitä", "siitä", "siinä", "jossa", "josta", "johon", "jonka", "mikä",  "mitä",
      "kanssa", "ennen", "jälkeen", "yli", "alla", "kautta", "vaan", "eli", "eikä", "olisi",
      "ole",  "olen", "olet",  "olemme", "olette", "ollut", "usein", "erityisesti"};
  StopwordSet out;
  if (language == "en") {
    out.insert(std::begin(kEnglish), std::end(kEnglish));
  } else if (language == "fi") {
    out.insert(std::begin(kFinnish), std::end(kFinnish));
  }
  return out;
}

Eigen::VectorXd avg_embedding(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                              const StopwordSet& stopwords) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dimension());
  std::size_t count = 0;
  for (const auto& raw : tokens) {
    const std::string tok = canonicalize_term(raw);
    if (tok.empty() || stopwords.count(tok)) continue;
    if (const auto* v = table.find(tok)) {
      sum += *v;
      ++count;
    }
  }
  if (count > 0) sum /= static_cast<double>(count);
  return sum;
}

std::vector<std::string> term_set_tokens(const TermSet& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms.terms()) {
    auto toks = tokenize(t);
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

namespace {

std::vector<DefinitionRecord> rerank_against(std::string_view term, const DefinitionStore& store,
                                             const Eigen::VectorXd& reference,
                                             const EmbeddingTable& table,
                                             const StopwordSet& stopwords) {
  std::vector<DefinitionRecord> records = store.lookup(canonicalize_term(term));
  for (auto& r : records) {
    r.relevance = cosine_similarity(avg_embedding(tokenize(r.text), table, stopwords), reference);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const DefinitionRecord& a, const DefinitionRecord& b) {
                     return a.relevance > b.relevance;
                   });
  return records;
}

}  // namespace

std::vector<DefinitionRecord> rerank_definitions(std::string_view term, const DefinitionStore& store,
                                                 const TermSet& term_set,
                                                 const EmbeddingTable& table,
                                                 const StopwordSet& stopwords) {
  const Eigen::VectorXd reference = avg_embedding(term_set_tokens(term_set), table, stopwords);
  return rerank_against(term, store, reference, table, stopwords);
}

DefinitionStore rerank_store(const DefinitionStore& store, const TermSet& term_set,
                             const EmbeddingTable& table, const StopwordSet& stopwords) {
  const Eigen::VectorXd reference = avg_embedding(term_set_tokens(term_set), table, stopwords);
  DefinitionStore out;
  for (const auto& term : term_set.terms()) {
    auto ranked = rerank_against(term, store, reference, table, stopwords);
    if (!ranked.empty()) out.set(term, std::move(ranked));
  }
  return out;
}

std::string term_context(std::string_view term, const DefinitionStore& store,
                         const ContextLimits& limits) {
  const std::string canon = canonicalize_term(term);
  std::string joined;
  std::size_t chars = 0;
  std::size_t used = 0;
  for (const auto& r : store.lookup(canon)) {
    if (used == limits.max_defs) break;
    const std::size_t len = utf8_decode(r.text).size();
    const std::size_t extra = (used == 0 ? 0 : 2) + len;
    if (chars + extra > limits.max_chars) break;
    if (used > 0) joined += ", ";
    joined += r.text;
    chars += extra;
    ++used;
  }
  return used == 0 ? canon + " ." : canon + " " + joined + " .";
}

std::pair<std::string, std::string> build_pair_context(std::string_view parent,
                                                       std::string_view child,
                                                       const DefinitionStore& store,
                                                       const ContextLimits& limits) {
  return {term_context(parent, store, limits), term_context(child, store, limits)};
}

}  // namespace taxoforge
