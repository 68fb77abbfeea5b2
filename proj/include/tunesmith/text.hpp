/**
 * @file text.hpp
 * @brief Tokenization, case folding and small file helpers.
 *
 * Tokens are split on whitespace, then on hyphens. Leading and trailing
 * non-alphanumerics are stripped; internal apostrophes survive so that
 * contractions still hit the pronouncing dictionary.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tunesmith/error.hpp"

namespace tunesmith {

inline bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_ascii_alnum(char c) { return is_ascii_alpha(c) || (c >= '0' && c <= '9'); }

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool has_alpha(std::string_view s) { return std::any_of(s.begin(), s.end(), is_ascii_alpha); }

inline bool has_alnum(std::string_view s) { return std::any_of(s.begin(), s.end(), is_ascii_alnum); }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string_view strip_punctuation(std::string_view s) {
  while (!s.empty() && !is_ascii_alnum(s.front())) s.remove_prefix(1);
  while (!s.empty() && !is_ascii_alnum(s.back())) s.remove_suffix(1);
  return s;
}

/// Lowercased, punctuation-stripped form used for every dictionary and model lookup.
inline std::string fold(std::string_view token) { return to_lower(strip_punctuation(token)); }

inline std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < s.size()) out.push_back(s.substr(start));
      break;
    }
    std::string_view line = s.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Range>
std::string join(const Range& parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += sep;
    out += p;
    first = false;
  }
  return out;
}

struct Token {
  std::string surface;  // stripped, original case
  std::string folded;   // stripped, lowercased
};

/// Splits a lyric line into word tokens. Pure-punctuation chunks vanish.
inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  for (std::string_view raw : split_whitespace(line)) {
    std::string chunk(raw);
    // Typographic apostrophe (U+2019) to ASCII.
    for (std::size_t pos; (pos = chunk.find("\xE2\x80\x99")) != std::string::npos;) {
      chunk.replace(pos, 3, "'");
    }
    for (const std::string& part : split(chunk, '-')) {
      std::string_view stripped = strip_punctuation(part);
      if (stripped.empty()) continue;
      out.push_back(Token{std::string(stripped), to_lower(stripped)});
    }
  }
  return out;
}

inline std::vector<std::string> folded_words(std::string_view line) {
  std::vector<std::string> out;
  for (auto& t : tokenize(line)) out.push_back(std::move(t.folded));
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::io, "short write to " + path.string());
}

}  // namespace tunesmith
