#include "taxoforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/io.hpp"
#include "taxoforge/text.hpp"

namespace taxoforge {

std::string_view to_string(SplitName name) {
  switch (name) {
    case SplitName::kTrain: return "train";
    case SplitName::kDev: return "dev";
    case SplitName::kTest: return "test";
  }
  return "test";
}

SplitName split_name_from_string(std::string_view s) {
  if (s == "train") return SplitName::kTrain;
  if (s == "dev") return SplitName::kDev;
  if (s == "test") return SplitName::kTest;
  throw InvalidArgument("unknown split '" + std::string(s) + "'");
}

std::vector<Taxonomy> parse_dataset(std::string_view text, const std::string& source_name) {
  std::vector<Taxonomy> trees;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      trees.push_back(taxonomy_from_json_text(line));
    } catch (const ValidationError& e) {
      throw ValidationError::at(source_name + ":" + std::to_string(line_no), e);
    }
  }
  check_unique_ids({&trees});
  return trees;
}

DatasetSplit load_dataset(const std::filesystem::path& path, SplitName name) {
  return {name, parse_dataset(read_file(path), path.string())};
}

std::string dataset_to_jsonl(const std::vector<Taxonomy>& trees) {
  std::string out;
  for (const auto& t : trees) {
    out += to_json_text(t);
    out += '\n';
  }
  return out;
}

void write_dataset(const std::vector<Taxonomy>& trees, const std::filesystem::path& path) {
  write_file(path, dataset_to_jsonl(trees));
}

void check_unique_ids(const std::vector<const std::vector<Taxonomy>*>& groups) {
  std::set<std::string> seen;
  for (const auto* g : groups) {
    for (const auto& t : *g) {
      if (!seen.insert(t.id()).second) throw ValidationError("duplicate tree id", t.id());
    }
  }
}

std::vector<std::string> check_profile(const Taxonomy& tree, const TreeProfile& profile) {
  std::vector<std::string> warnings;
  const std::size_t depth = tree.max_depth();
  if (depth != profile.depth) {
    warnings.push_back(tree.id() + ": depth " + std::to_string(depth) + " != " +
                       std::to_string(profile.depth));
  }
  if (tree.size() < profile.min_terms || tree.size() > profile.max_terms) {
    warnings.push_back(tree.id() + ": size " + std::to_string(tree.size()) + " outside [" +
                       std::to_string(profile.min_terms) + "," +
                       std::to_string(profile.max_terms) + "]");
  }
  return warnings;
}

std::array<std::size_t, 3> split_sizes(std::size_t count, const std::array<double, 3>& fractions) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw InvalidArgument("split fractions must be non-negative");
    total += f;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw InvalidArgument("split fractions must sum to 1");
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double quota = fractions[k] / total * static_cast<double>(count);
    // Absorb representation error so that e.g. 761 * 533/761 lands on 533.
    const double floor_q = std::floor(quota + 1e-9);
    sizes[k] = static_cast<std::size_t>(floor_q);
    remainder[k] = std::max(0.0, quota - floor_q);
    assigned += sizes[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

std::array<DatasetSplit, 3> split_dataset(std::vector<Taxonomy> trees,
                                          const std::array<double, 3>& fractions,
                                          std::uint64_t seed) {
  if (trees.empty()) throw InvalidArgument("cannot split an empty dataset");
  check_unique_ids({&trees});
  const auto sizes = split_sizes(trees.size(), fractions);
  std::vector<std::size_t> order(trees.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::array<DatasetSplit, 3> out{DatasetSplit{SplitName::kTrain, {}},
                                  DatasetSplit{SplitName::kDev, {}},
                                  DatasetSplit{SplitName::kTest, {}}};
  std::size_t pos = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t c = 0; c < sizes[k]; ++c) out[k].trees.push_back(std::move(trees[order[pos++]]));
  }
  return out;
}

std::filesystem::path CorpusManifest::split_path(SplitName s) const {
  switch (s) {
    case SplitName::kTrain: return train;
    case SplitName::kDev: return dev;
    case SplitName::kTest: return test;
  }
  return test;
}

CorpusManifest parse_manifest(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed manifest", e.what());
  }
  auto str = [&](const nlohmann::json& j, const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string()) {
      throw ValidationError("malformed manifest", std::string("missing string field '") + key + "'");
    }
    return j[key].get<std::string>();
  };
  auto opt = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
    return std::filesystem::path(str(doc, key));
  };
  if (!doc.is_object() || !doc.contains("splits") || !doc["splits"].is_object()) {
    throw ValidationError("malformed manifest", "missing object field 'splits'");
  }
  CorpusManifest m;
  m.name = str(doc, "name");
  if (doc.contains("language")) m.language = str(doc, "language");
  m.train = str(doc["splits"], "train");
  m.dev = str(doc["splits"], "dev");
  m.test = str(doc["splits"], "test");
  m.definitions = opt("definitions");
  m.embeddings = opt("embeddings");
  m.stopwords = opt("stopwords");
  return m;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  CorpusManifest m = [&] {
    try {
      return parse_manifest(read_file(path));
    } catch (const ValidationError& e) {
      throw ValidationError::at(path.string(), e);
    }
  }();
  const auto base = path.parent_path();
  auto resolve = [&](std::filesystem::path& p) {
    if (p.is_relative()) p = base / p;
  };
  resolve(m.train);
  resolve(m.dev);
  resolve(m.test);
  for (auto* o : {&m.definitions, &m.embeddings, &m.stopwords}) {
    if (*o) resolve(**o);
  }
  return m;
}

std::string manifest_to_json_text(const CorpusManifest& m) {
  nlohmann::ordered_json doc;
  doc["name"] = m.name;
  doc["language"] = m.language;
  doc["splits"] = {{"train", m.train.generic_string()},
                   {"dev", m.dev.generic_string()},
                   {"test", m.test.generic_string()}};
  doc["definitions"] = m.definitions ? nlohmann::ordered_json(m.definitions->generic_string()) : nullptr;
  doc["embeddings"] = m.embeddings ? nlohmann::ordered_json(m.embeddings->generic_string()) : nullptr;
  doc["stopwords"] = m.stopwords ? nlohmann::ordered_json(m.stopwords->generic_string()) : nullptr;
  return doc.dump(2) + "\n";
}

}  // namespace taxoforge
