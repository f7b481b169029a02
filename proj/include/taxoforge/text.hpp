#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace taxoforge {

/// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

/// Locale-independent lowercasing of Latin, Greek and Cyrillic letters.
std::string to_lower(std::string_view s);

bool is_unicode_space(char32_t c);

/// Canonical form of a term: underscores become spaces, surrounding
/// whitespace is trimmed, letters are lowercased.
std::string canonicalize_term(std::string_view term);

std::string trim(std::string_view s);

/// Whitespace split, leading/trailing punctuation stripped, lowercased.
/// Tokens that are pure punctuation are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// True if `needle` occurs as a contiguous run inside `haystack`.
bool contains_token_run(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle);

/// Set of distinct character n-grams (by code point) of `s`.
std::vector<std::u32string> char_ngrams(std::string_view s, std::size_t n);

}  // namespace taxoforge
