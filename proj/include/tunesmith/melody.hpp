/**
 * @file melody.hpp
 * @brief Melody model and its compilation into syllable budgets and rhythm marks.
 *
 * A melody is a list of phrases; each phrase a list of timed notes. Rests
 * (notes without pitch) take no syllable. Notes sharing a slur group inside a
 * phrase are sung on one syllable. A slot is marked stressed when its duration
 * is at least the mean slot duration of its scope (the phrase by default).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunesmith/error.hpp"
#include "tunesmith/phonetics.hpp"

namespace tunesmith {

struct Note {
  double duration = 1.0;     // beats
  std::optional<int> pitch;  // MIDI number; absent for a rest
  std::optional<int> slur;   // melisma group id within the phrase

  bool is_rest() const { return !pitch.has_value(); }
};

struct Phrase {
  std::vector<Note> notes;
};

struct Melody {
  std::vector<Phrase> phrases;
  std::optional<std::string> title;
};

struct SyllableSlot {
  double duration = 0.0;
  std::size_t phrase_index = 0;
  std::size_t slot_index = 0;
};

struct ConstraintSet {
  std::vector<std::size_t> budgets;
  std::vector<StressPattern> rhythm;

  std::size_t phrase_count() const { return budgets.size(); }

  std::size_t total_slots() const {
    std::size_t n = 0;
    for (auto b : budgets) n += b;
    return n;
  }

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

enum class MeanScope { per_phrase, per_song };

namespace detail {

inline Error melody_error(std::size_t phrase, std::optional<std::size_t> note, const std::string& what) {
  std::string where = "phrase " + std::to_string(phrase);
  if (note) where += ", note " + std::to_string(*note);
  return Error(Errc::parse, where + ": " + what);
}

inline void validate_phrase(const Phrase& phrase, std::size_t pi) {
  if (phrase.notes.empty()) throw melody_error(pi, std::nullopt, "phrase has no notes");
  std::vector<int> closed_groups;
  std::optional<int> open_group;
  for (std::size_t ni = 0; ni < phrase.notes.size(); ++ni) {
    const Note& n = phrase.notes[ni];
    if (!(n.duration > 0.0) || !std::isfinite(n.duration)) {
      throw melody_error(pi, ni, "duration must be a finite number > 0");
    }
    if (n.slur && *n.slur <= 0) throw melody_error(pi, ni, "slur group must be a positive integer");
    if (n.slur && n.is_rest()) throw melody_error(pi, ni, "a rest cannot carry a slur group");
    if (n.slur != open_group) {
      if (open_group) closed_groups.push_back(*open_group);
      if (n.slur && std::find(closed_groups.begin(), closed_groups.end(), *n.slur) != closed_groups.end()) {
        throw melody_error(pi, ni, "slur group " + std::to_string(*n.slur) + " is not a consecutive run");
      }
      open_group = n.slur;
    }
  }
}

}  // namespace detail

inline void validate(const Melody& melody) {
  if (melody.phrases.empty()) throw Error(Errc::parse, "melody has no phrases");
  for (std::size_t pi = 0; pi < melody.phrases.size(); ++pi) {
    detail::validate_phrase(melody.phrases[pi], pi);
  }
}

/// Reads the melody JSON schema:
/// {"title": "...", "phrases": [{"notes": [{"dur": 1, "pitch": 60, "slur": 1}]}]}
inline Melody parse_melody(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("melody is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::parse, "melody document must be an object");
  Melody m;
  if (doc.contains("title") && !doc["title"].is_null()) {
    if (!doc["title"].is_string()) throw Error(Errc::parse, "title must be a string");
    m.title = doc["title"].get<std::string>();
  }
  if (!doc.contains("phrases") || !doc["phrases"].is_array()) {
    throw Error(Errc::parse, "melody needs a \"phrases\" array");
  }
  const json& phrases = doc["phrases"];
  for (std::size_t pi = 0; pi < phrases.size(); ++pi) {
    const json& p = phrases[pi];
    if (!p.is_object() || !p.contains("notes") || !p["notes"].is_array()) {
      throw detail::melody_error(pi, std::nullopt, "phrase needs a \"notes\" array");
    }
    Phrase phrase;
    const json& notes = p["notes"];
    for (std::size_t ni = 0; ni < notes.size(); ++ni) {
      const json& n = notes[ni];
      if (!n.is_object()) throw detail::melody_error(pi, ni, "note must be an object");
      Note note;
      if (!n.contains("dur") || !n["dur"].is_number()) {
        throw detail::melody_error(pi, ni, "\"dur\" must be a number");
      }
      note.duration = n["dur"].get<double>();
      if (!n.contains("pitch")) throw detail::melody_error(pi, ni, "\"pitch\" is required (integer or null)");
      if (!n["pitch"].is_null()) {
        if (!n["pitch"].is_number_integer()) {
          throw detail::melody_error(pi, ni, "\"pitch\" must be an integer or null");
        }
        note.pitch = n["pitch"].get<int>();
      }
      if (n.contains("slur") && !n["slur"].is_null()) {
        if (!n["slur"].is_number_integer()) throw detail::melody_error(pi, ni, "\"slur\" must be an integer");
        note.slur = n["slur"].get<int>();
      }
      phrase.notes.push_back(note);
    }
    m.phrases.push_back(std::move(phrase));
  }
  validate(m);
  return m;
}

inline std::string to_json(const Melody& m) {
  using nlohmann::ordered_json;
  ordered_json doc;
  if (m.title) doc["title"] = *m.title;
  doc["phrases"] = ordered_json::array();
  for (const auto& p : m.phrases) {
    ordered_json notes = ordered_json::array();
    for (const auto& n : p.notes) {
      ordered_json j;
      j["dur"] = n.duration;
      j["pitch"] = n.pitch ? ordered_json(*n.pitch) : ordered_json(nullptr);
      if (n.slur) j["slur"] = *n.slur;
      notes.push_back(std::move(j));
    }
    doc["phrases"].push_back({{"notes", std::move(notes)}});
  }
  return doc.dump(2) + "\n";
}

inline std::vector<SyllableSlot> syllable_slots(const Phrase& phrase, std::size_t phrase_index = 0) {
  std::vector<SyllableSlot> slots;
  std::optional<int> current_group;
  for (const Note& n : phrase.notes) {
    if (n.is_rest()) {
      current_group.reset();
      continue;
    }
    if (n.slur && n.slur == current_group && !slots.empty()) {
      slots.back().duration += n.duration;
      continue;
    }
    slots.push_back(SyllableSlot{n.duration, phrase_index, slots.size()});
    current_group = n.slur;
  }
  return slots;
}

namespace detail {

// Relative tolerance so that a slot equal to the mean stays stressed despite
// rounding in the sum.
inline bool at_least_mean(double duration, double mean) {
  return duration >= mean - 1e-9 * mean;
}

}  // namespace detail

inline ConstraintSet compile_constraints(const Melody& melody, MeanScope scope = MeanScope::per_phrase) {
  ConstraintSet cs;
  std::vector<std::vector<SyllableSlot>> all;
  double song_sum = 0.0;
  std::size_t song_n = 0;
  for (std::size_t i = 0; i < melody.phrases.size(); ++i) {
    all.push_back(syllable_slots(melody.phrases[i], i));
    for (const auto& s : all.back()) song_sum += s.duration;
    song_n += all.back().size();
  }
  const double song_mean = song_n ? song_sum / static_cast<double>(song_n) : 0.0;
  for (const auto& slots : all) {
    double mean = song_mean;
    if (scope == MeanScope::per_phrase && !slots.empty()) {
      double sum = 0.0;
      for (const auto& s : slots) sum += s.duration;
      mean = sum / static_cast<double>(slots.size());
    }
    StressPattern marks;
    for (const auto& s : slots) {
      marks.push_back(detail::at_least_mean(s.duration, mean) ? Stress::stressed : Stress::unstressed);
    }
    cs.budgets.push_back(slots.size());
    cs.rhythm.push_back(std::move(marks));
  }
  return cs;
}

inline std::string to_json(const ConstraintSet& cs) {
  nlohmann::ordered_json doc;
  doc["budgets"] = cs.budgets;
  doc["rhythm"] = nlohmann::ordered_json::array();
  for (const auto& r : cs.rhythm) doc["rhythm"].push_back(to_string(r));
  return doc.dump(2) + "\n";
}

inline ConstraintSet parse_constraints(std::string_view text) {
  ConstraintSet cs;
  try {
    auto doc = nlohmann::json::parse(text);
    cs.budgets = doc.at("budgets").get<std::vector<std::size_t>>();
    for (const auto& r : doc.at("rhythm")) cs.rhythm.push_back(parse_stress_pattern(r.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("constraint file: ") + e.what());
  }
  if (cs.budgets.size() != cs.rhythm.size()) throw Error(Errc::parse, "constraint file: budgets/rhythm length mismatch");
  for (std::size_t i = 0; i < cs.budgets.size(); ++i) {
    if (cs.rhythm[i].size() != cs.budgets[i]) {
      throw Error(Errc::parse, "constraint file: phrase " + std::to_string(i) + " rhythm length != budget");
    }
  }
  return cs;
}

}  // namespace tunesmith
