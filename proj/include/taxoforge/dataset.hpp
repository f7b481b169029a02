#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

enum class SplitName { kTrain, kDev, kTest };

std::string_view to_string(SplitName name);
SplitName split_name_from_string(std::string_view s);

struct DatasetSplit {
  SplitName name = SplitName::kTest;
  std::vector<Taxonomy> trees;
  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

/// One taxonomy record per line; blank lines are skipped. Errors carry
/// "<source>:<line>" and, for invariant violations, the tree id.
std::vector<Taxonomy> parse_dataset(std::string_view text, const std::string& source_name);
DatasetSplit load_dataset(const std::filesystem::path& path, SplitName name = SplitName::kTest);

std::string dataset_to_jsonl(const std::vector<Taxonomy>& trees);
void write_dataset(const std::vector<Taxonomy>& trees, const std::filesystem::path& path);

/// Throws ValidationError("duplicate tree id") if any id repeats.
void check_unique_ids(const std::vector<const std::vector<Taxonomy>*>& groups);

struct TreeProfile {
  std::size_t depth = 3;
  std::size_t min_terms = 10;
  std::size_t max_terms = 50;
};

/// Non-fatal warnings for trees outside the medium-subtree profile
/// (max depth 3, 10..50 terms). Empty for conforming trees.
std::vector<std::string> check_profile(const Taxonomy& tree, const TreeProfile& profile = {});

/// Weights 533:114:114.
inline constexpr std::array<double, 3> kDefaultSplitFractions = {533.0 / 761.0, 114.0 / 761.0,
                                                                 114.0 / 761.0};

/// Split sizes by largest-remainder rounding (ties to the earlier split).
std::array<std::size_t, 3> split_sizes(std::size_t count, const std::array<double, 3>& fractions);

/// Shuffles by `seed` and cuts into train/dev/test of split_sizes().
std::array<DatasetSplit, 3> split_dataset(std::vector<Taxonomy> trees,
                                          const std::array<double, 3>& fractions,
                                          std::uint64_t seed);

/// Corpus manifest. Paths are stored as written; resolve() makes them
/// relative to the manifest's directory.
struct CorpusManifest {
  std::string name;
  std::string language = "en";
  std::filesystem::path train, dev, test;
  std::optional<std::filesystem::path> definitions, embeddings, stopwords;

  std::filesystem::path split_path(SplitName s) const;
};

CorpusManifest parse_manifest(std::string_view text);
CorpusManifest load_manifest(const std::filesystem::path& path);  // paths resolved
std::string manifest_to_json_text(const CorpusManifest& manifest);

}  // namespace taxoforge
