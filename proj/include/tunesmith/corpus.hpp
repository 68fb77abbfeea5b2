/**
 * @file corpus.hpp
 * @brief Lyrics corpus: songs separated by blank lines, optional "# key: value" headers.
 */
#pragma once

#include <string>
#include <utility>
#include <string_view>
#include <vector>

#include "tunesmith/error.hpp"
#include "tunesmith/text.hpp"

namespace tunesmith {

struct Song {
  std::string title;
  std::string genre;
  std::vector<std::string> lines;
};

inline std::vector<Song> parse_corpus(std::string_view text) {
  std::vector<Song> songs;
  Song current;
  auto flush = [&] {
    if (!current.lines.empty()) songs.push_back(std::move(current));
    current = Song{};
  };
  for (auto raw : split_lines(text)) {
    auto line = trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      auto colon = body.find(':');
      if (colon != std::string_view::npos) {
        auto key = to_lower(trim(body.substr(0, colon)));
        auto value = std::string(trim(body.substr(colon + 1)));
        if (key == "title") current.title = value;
        else if (key == "genre") current.genre = to_lower(value);
      }
      continue;
    }
    current.lines.emplace_back(line);
  }
  flush();
  return songs;
}

inline std::vector<std::string> corpus_lines(const std::vector<Song>& songs) {
  std::vector<std::string> out;
  for (const auto& s : songs) out.insert(out.end(), s.lines.begin(), s.lines.end());
  return out;
}

}  // namespace tunesmith
