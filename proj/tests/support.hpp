// Shared fixtures: the shipped data files and a trigram trained on the corpus.
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tunesmith/tunesmith.hpp"

namespace support {

inline std::filesystem::path data_dir() { return TUNESMITH_DATA_DIR; }

inline const tunesmith::Lexicon& cmudict() {
  static const auto lex = tunesmith::Lexicon::load(data_dir() / "cmudict" / "cmudict.dict");
  return lex;
}

inline const std::vector<tunesmith::Song>& corpus() {
  static const auto songs = tunesmith::parse_corpus(tunesmith::read_file(data_dir() / "corpus" / "sonnets.txt"));
  return songs;
}

inline const tunesmith::NGramModel& trigram() {
  static const auto model = tunesmith::NGramModel::train(tunesmith::corpus_lines(corpus()), tunesmith::NGramConfig{});
  return model;
}

inline const tunesmith::CooccurrenceTable& cooccurrence() {
  static const auto table = tunesmith::CooccurrenceTable::build(corpus());
  return table;
}

/// Pitched notes only, durations from {0.5, 1, 1.5, 2}, occasional rests and slurs.
inline tunesmith::Melody random_melody(std::mt19937_64& rng, std::size_t min_phrases, std::size_t max_phrases,
                                       std::size_t min_budget, std::size_t max_budget) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
  };
  const double durs[] = {0.5, 1.0, 1.5, 2.0};
  tunesmith::Melody m;
  const std::size_t phrases = pick(min_phrases, max_phrases);
  for (std::size_t p = 0; p < phrases; ++p) {
    tunesmith::Phrase ph;
    const std::size_t slots = pick(min_budget, max_budget);
    int group = 0;
    for (std::size_t s = 0; s < slots; ++s) {
      if (rng() % 8 == 0) ph.notes.push_back({1.0, std::nullopt, std::nullopt});
      if (rng() % 6 == 0) {
        ++group;
        ph.notes.push_back({durs[rng() % 4], 60 + static_cast<int>(rng() % 12), group});
        ph.notes.push_back({durs[rng() % 4], 60 + static_cast<int>(rng() % 12), group});
      } else {
        ph.notes.push_back({durs[rng() % 4], 60 + static_cast<int>(rng() % 12), std::nullopt});
      }
    }
    m.phrases.push_back(std::move(ph));
  }
  return m;
}

}  // namespace support
