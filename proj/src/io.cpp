#include "taxoforge/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "taxoforge/error.hpp"

namespace taxoforge {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write file", path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ValidationError("cannot write file", path.string());
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("bad number", "'" + std::string(s) + "'");
  }
  return x;
}

double round_half_even(double x, int places) {
  if (!std::isfinite(x)) return x;
  // Exact decimal expansion of the binary value; 1100 digits covers every
  // double's fractional part.
  static thread_local std::array<char, 1500> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::fabs(x),
                                 std::chars_format::fixed, 1100);
  std::string digits(buf.data(), end);
  const auto dot = digits.find('.');
  std::string int_part = digits.substr(0, dot);
  std::string frac = digits.substr(dot + 1);
  std::string kept = int_part + frac.substr(0, static_cast<std::size_t>(places));
  const char next = frac[static_cast<std::size_t>(places)];
  const bool rest_nonzero =
      frac.find_first_not_of('0', static_cast<std::size_t>(places) + 1) != std::string::npos;
  bool round_up = false;
  if (next > '5' || (next == '5' && rest_nonzero)) {
    round_up = true;
  } else if (next == '5') {
    round_up = ((kept.back() - '0') % 2) == 1;
  }
  if (round_up) {
    int i = static_cast<int>(kept.size()) - 1;
    while (i >= 0 && kept[static_cast<std::size_t>(i)] == '9') kept[static_cast<std::size_t>(i--)] = '0';
    if (i < 0) {
      kept.insert(kept.begin(), '1');
    } else {
      ++kept[static_cast<std::size_t>(i)];
    }
  }
  const std::size_t split = kept.size() - static_cast<std::size_t>(places);
  std::string text = kept.substr(0, split) + "." + kept.substr(split);
  double r = parse_double(text);
  return std::signbit(x) && r != 0.0 ? -r : r;
}

bool has_non_finite_literal(std::string_view text) {
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      continue;
    }
    for (std::string_view lit : {"NaN", "nan", "Infinity", "inf", "Inf"}) {
      if (text.substr(i, lit.size()) == lit) return true;
    }
  }
  return false;
}

}  // namespace taxoforge
