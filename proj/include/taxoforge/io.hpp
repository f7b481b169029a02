#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace taxoforge {

std::string read_file(const std::filesystem::path& path);

/// Creates missing parent directories; throws on write failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Parses a full decimal string; throws ValidationError("bad number") on junk.
double parse_double(std::string_view s);

/// Rounds to `places` decimals, ties to even, on the exact binary value.
double round_half_even(double x, int places);

/// True if JSON text contains a bare NaN/Infinity literal outside strings.
bool has_non_finite_literal(std::string_view json_text);

}  // namespace taxoforge
