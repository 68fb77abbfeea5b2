/**
 * @file multitask.hpp
 * @brief Training-data generators for the four syllable-planning tasks.
 *
 *   T1  plan with budgets -> "Line 1: <text>; Line 2: ..."
 *   T2  line -> total syllable count
 *   T3  plan with budgets -> lines with a running count after every word
 *   T4  words -> syllabified phonemes without stress digits ("RIH_VER")
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunesmith/corpus.hpp"
#include "tunesmith/error.hpp"
#include "tunesmith/phonetics.hpp"
#include "tunesmith/planner.hpp"
#include "tunesmith/text.hpp"

namespace tunesmith {

enum class Task { t1 = 0, t2 = 1, t3 = 2, t4 = 3 };

inline constexpr std::array<Task, 4> kAllTasks = {Task::t1, Task::t2, Task::t3, Task::t4};

inline std::string task_name(Task t) { return "T" + std::to_string(static_cast<int>(t) + 1); }

struct TaskSample {
  Task task = Task::t1;
  std::string input;
  std::string output;

  friend bool operator==(const TaskSample&, const TaskSample&) = default;
};

struct SkipRecord {
  Task task = Task::t1;
  std::string reason;
};

namespace detail {

inline std::vector<std::size_t> line_budgets(const Lexicon& lex, const std::vector<std::string>& song) {
  std::vector<std::size_t> out;
  for (const auto& line : song) {
    try {
      out.push_back(count_syllables_line(lex, line));
    } catch (const Error& e) {
      throw Error(Errc::skipped, "line '" + line + "': " + e.what());
    }
  }
  return out;
}

inline void check_song(const std::vector<std::string>& song, const Plan& plan) {
  if (song.empty()) throw Error(Errc::invalid_argument, "song has no lines");
  if (plan.lines.size() != song.size()) {
    throw Error(Errc::invalid_argument, "plan has " + std::to_string(plan.lines.size()) + " lines, song has " +
                                            std::to_string(song.size()));
  }
}

}  // namespace detail

inline TaskSample emit_t1(const Lexicon& lex, const std::vector<std::string>& song, const Plan& plan) {
  detail::check_song(song, plan);
  auto budgets = detail::line_budgets(lex, song);
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < song.size(); ++i) {
    parts.push_back("Line " + std::to_string(i + 1) + ": " + std::string(trim(song[i])));
  }
  return TaskSample{Task::t1, render_plan(plan, budgets), join(parts, "; ")};
}

inline TaskSample emit_t2(const Lexicon& lex, std::string_view line) {
  auto text = trim(line);
  if (tokenize(text).empty()) throw Error(Errc::skipped, "empty line");
  std::size_t n = 0;
  try {
    n = count_syllables_line(lex, text);
  } catch (const Error& e) {
    throw Error(Errc::skipped, e.what());
  }
  return TaskSample{Task::t2, std::string(text), std::to_string(n)};
}

/// "Moon (1) river (3) wider (5) ..." for one line.
inline std::string running_counts(const Lexicon& lex, std::string_view line) {
  std::vector<std::string> parts;
  std::size_t running = 0;
  for (const auto& t : tokenize(line)) {
    if (!has_alpha(t.surface)) throw Error(Errc::skipped, "non-lexical token '" + t.surface + "'");
    running += count_syllables_word(lex, t.surface).count;
    parts.push_back(t.surface + " (" + std::to_string(running) + ")");
  }
  return join(parts, " ");
}

inline TaskSample emit_t3(const Lexicon& lex, const std::vector<std::string>& song, const Plan& plan) {
  detail::check_song(song, plan);
  auto budgets = detail::line_budgets(lex, song);
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < song.size(); ++i) {
    parts.push_back("Line " + std::to_string(i + 1) + ": " + running_counts(lex, song[i]));
  }
  return TaskSample{Task::t3, render_plan(plan, budgets), join(parts, "; ")};
}

/// OOV words are dropped and reported through `skipped`.
inline TaskSample emit_t4(const Lexicon& lex, const std::vector<std::string>& words,
                          std::vector<SkipRecord>* skipped = nullptr,
                          const OnsetTable& onsets = OnsetTable::builtin()) {
  std::vector<std::string> in;
  std::vector<std::string> out;
  for (const auto& w : words) {
    auto prons = lex.lookup(w);
    if (prons.empty()) {
      if (skipped) skipped->push_back({Task::t4, "out-of-vocabulary word '" + w + "'"});
      continue;
    }
    in.emplace_back(strip_punctuation(w));
    out.push_back(syllable_string(syllabify(prons.front(), onsets)));
  }
  if (in.empty()) throw Error(Errc::skipped, "no in-vocabulary words");
  return TaskSample{Task::t4, join(in, "; "), join(out, "; ")};
}

struct TaskMix {
  std::array<double, 4> ratio{1.0, 0.0, 0.0, 0.0};

  static TaskMix parse(std::string_view text) {
    TaskMix mix;
    mix.ratio = {0.0, 0.0, 0.0, 0.0};
    for (const auto& item : split(text, ',')) {
      auto kv = split(trim(item), '=');
      if (kv.size() != 2) throw Error(Errc::invalid_argument, "task mix item '" + item + "' is not T<n>=<ratio>");
      auto key = to_upper(trim(kv[0]));
      if (key.size() != 2 || key[0] != 'T' || key[1] < '1' || key[1] > '4') {
        throw Error(Errc::invalid_argument, "unknown task '" + kv[0] + "'");
      }
      try {
        mix.ratio[static_cast<std::size_t>(key[1] - '1')] = std::stod(kv[1]);
      } catch (...) {
        throw Error(Errc::invalid_argument, "bad ratio '" + kv[1] + "'");
      }
    }
    mix.validate();
    return mix;
  }

  void validate() const {
    double sum = 0.0;
    for (double r : ratio) {
      if (r < 0.0 || !std::isfinite(r)) throw Error(Errc::invalid_argument, "task ratios must be >= 0");
      sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(Errc::invalid_argument, "task ratios must sum to 1");
  }

  /// Largest-remainder apportionment of n songs; ties go to the earlier task.
  std::array<std::size_t, 4> allocate(std::size_t n) const {
    std::array<std::size_t, 4> counts{};
    std::array<double, 4> frac{};
    std::size_t assigned = 0;
    for (std::size_t t = 0; t < 4; ++t) {
      double exact = ratio[t] * static_cast<double>(n);
      counts[t] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      frac[t] = exact - static_cast<double>(counts[t]);
      assigned += counts[t];
    }
    while (assigned < n) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < 4; ++t) {
        if (frac[t] > frac[best]) best = t;
      }
      ++counts[best];
      frac[best] = -1.0;
      ++assigned;
    }
    return counts;
  }
};

struct Dataset {
  std::array<std::vector<TaskSample>, 4> samples;
  std::array<std::size_t, 4> songs_allocated{};
  std::vector<SkipRecord> skipped;
  std::uint64_t seed = 0;
  TaskMix mix;
  std::vector<std::size_t> song_order;

  std::string manifest_json() const {
    nlohmann::ordered_json doc;
    doc["seed"] = seed;
    nlohmann::ordered_json tasks = nlohmann::ordered_json::object();
    for (Task t : kAllTasks) {
      auto i = static_cast<std::size_t>(t);
      tasks[task_name(t)] = {{"ratio", mix.ratio[i]},
                             {"songs", songs_allocated[i]},
                             {"samples", samples[i].size()},
                             {"file", "t" + std::to_string(i + 1) + ".tsv"}};
    }
    doc["tasks"] = std::move(tasks);
    doc["song_order"] = song_order;
    nlohmann::ordered_json skips = nlohmann::ordered_json::array();
    for (const auto& s : skipped) skips.push_back({{"task", task_name(s.task)}, {"reason", s.reason}});
    doc["skipped"] = std::move(skips);
    return doc.dump(2) + "\n";
  }
};

namespace detail {

// Fisher-Yates with rejection sampling, stable across standard libraries.
inline void shuffle_indices(std::vector<std::size_t>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(v[i - 1], v[static_cast<std::size_t>(r % bound)]);
  }
}

inline std::string tsv_field(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace detail

/// Training plan of a gold song: each line's own top salient words.
inline Plan gold_plan(const std::vector<std::string>& song, std::size_t keywords_per_line) {
  Plan p;
  for (const auto& line : song) p.lines.push_back(extract_salient(line, keywords_per_line));
  return p;
}

/// Songs are shuffled with the seed and apportioned to tasks by the mix.
/// T1/T3 emit one sample per song, T2 one per line, T4 one per song (its distinct words).
inline Dataset build_dataset(const std::vector<Song>& songs, const Lexicon& lex, const TaskMix& mix,
                             std::uint64_t seed, std::size_t keywords_per_line = 2) {
  mix.validate();
  if (songs.empty()) throw Error(Errc::invalid_argument, "corpus has no songs");
  Dataset ds;
  ds.seed = seed;
  ds.mix = mix;
  ds.songs_allocated = mix.allocate(songs.size());
  ds.song_order.resize(songs.size());
  for (std::size_t i = 0; i < songs.size(); ++i) ds.song_order[i] = i;
  detail::shuffle_indices(ds.song_order, seed);

  std::size_t cursor = 0;
  for (Task task : kAllTasks) {
    const auto ti = static_cast<std::size_t>(task);
    for (std::size_t n = 0; n < ds.songs_allocated[ti]; ++n, ++cursor) {
      const Song& song = songs[ds.song_order[cursor]];
      try {
        switch (task) {
          case Task::t1:
            ds.samples[ti].push_back(emit_t1(lex, song.lines, gold_plan(song.lines, keywords_per_line)));
            break;
          case Task::t3:
            ds.samples[ti].push_back(emit_t3(lex, song.lines, gold_plan(song.lines, keywords_per_line)));
            break;
          case Task::t2:
            for (const auto& line : song.lines) {
              try {
                ds.samples[ti].push_back(emit_t2(lex, line));
              } catch (const Error& e) {
                if (e.code() != Errc::skipped) throw;
                ds.skipped.push_back({task, e.what()});
              }
            }
            break;
          case Task::t4: {
            std::vector<std::string> words;
            std::set<std::string> seen;
            for (const auto& line : song.lines) {
              for (const auto& t : tokenize(line)) {
                if (seen.insert(t.folded).second) words.push_back(t.folded);
              }
            }
            ds.samples[ti].push_back(emit_t4(lex, words, &ds.skipped));
            break;
          }
        }
      } catch (const Error& e) {
        if (e.code() != Errc::skipped) throw;
        ds.skipped.push_back({task, e.what()});
      }
    }
  }
  return ds;
}

/// Writes t1.tsv .. t4.tsv (input TAB output per line) and manifest.json.
inline void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (Task t : kAllTasks) {
    auto i = static_cast<std::size_t>(t);
    std::string body;
    for (const auto& s : ds.samples[i]) body += detail::tsv_field(s.input) + "\t" + detail::tsv_field(s.output) + "\n";
    write_file(dir / ("t" + std::to_string(i + 1) + ".tsv"), body);
  }
  write_file(dir / "manifest.json", ds.manifest_json());
}

/// Fraction of lines whose syllable count equals the target exactly.
inline double success_rate(const Lexicon& lex, const std::vector<std::string>& outputs,
                           const std::vector<std::size_t>& targets) {
  if (outputs.empty()) throw Error(Errc::invalid_argument, "no outputs to score");
  if (outputs.size() != targets.size()) throw Error(Errc::invalid_argument, "outputs and targets differ in length");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    std::optional<std::size_t> n;
    try {
      n = count_syllables_line(lex, outputs[i]);
    } catch (const Error&) {
    }
    if (n && *n == targets[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(outputs.size());
}

}  // namespace tunesmith
