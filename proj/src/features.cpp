#include "taxoforge/features.hpp"

#include <algorithm>
#include <iterator>

#include "taxoforge/text.hpp"

namespace taxoforge {

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> kNames = {
      "head_word_match",  "parent_containment", "token_jaccard", "embedding_cosine",
      "definition_cosine", "definition_mention", "char4_dice"};
  return kNames;
}

PairFeaturizer::PairFeaturizer(const std::vector<std::string>& terms,
                               const DefinitionStore& definitions,
                               const EmbeddingTable& embeddings, const StopwordSet& stopwords) {
  info_.reserve(terms.size());
  for (const auto& raw : terms) {
    TermInfo t;
    t.text = canonicalize_term(raw);
    t.tokens = tokenize(t.text);
    t.token_set = t.tokens;
    std::sort(t.token_set.begin(), t.token_set.end());
    t.token_set.erase(std::unique(t.token_set.begin(), t.token_set.end()), t.token_set.end());
    t.grams = char_ngrams(t.text, 4);
    // Term vectors keep stopwords: a term is short and every token counts.
    t.vector = avg_embedding(t.tokens, embeddings, {});
    const auto& defs = definitions.lookup(t.text);
    if (!defs.empty()) {
      t.has_definition = true;
      t.definition_tokens = tokenize(defs.front().text);
      t.definition_vector = avg_embedding(t.definition_tokens, embeddings, stopwords);
    }
    info_.push_back(std::move(t));
  }
}

FeatureVector PairFeaturizer::operator()(std::size_t parent, std::size_t child) const {
  const TermInfo& p = info_.at(parent);
  const TermInfo& c = info_.at(child);
  FeatureVector f = FeatureVector::Zero();

  const bool differ = p.text != c.text;
  if (differ && !p.tokens.empty() && !c.tokens.empty() && p.tokens.back() == c.tokens.back()) {
    f(0) = 1.0;
  }
  if (differ && contains_token_run(c.tokens, p.tokens)) f(1) = 1.0;

  std::vector<std::string> common;
  std::set_intersection(p.token_set.begin(), p.token_set.end(), c.token_set.begin(),
                        c.token_set.end(), std::back_inserter(common));
  const std::size_t uni = p.token_set.size() + c.token_set.size() - common.size();
  if (uni > 0) f(2) = static_cast<double>(common.size()) / static_cast<double>(uni);

  f(3) = cosine_similarity(p.vector, c.vector);

  if (c.has_definition) {
    f(4) = cosine_similarity(p.vector, c.definition_vector);
    if (contains_token_run(c.definition_tokens, p.tokens)) f(5) = 1.0;
  }

  std::vector<std::u32string> shared;
  std::set_intersection(p.grams.begin(), p.grams.end(), c.grams.begin(), c.grams.end(),
                        std::back_inserter(shared));
  const std::size_t total = p.grams.size() + c.grams.size();
  if (total > 0) f(6) = 2.0 * static_cast<double>(shared.size()) / static_cast<double>(total);
  return f;
}

FeatureVector featurize(std::string_view parent, std::string_view child,
                        const DefinitionStore& definitions, const EmbeddingTable& embeddings,
                        const StopwordSet& stopwords) {
  PairFeaturizer fz({std::string(parent), std::string(child)}, definitions, embeddings, stopwords);
  return fz(0, 1);
}

}  // namespace taxoforge
