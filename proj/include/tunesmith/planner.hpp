/**
 * @file planner.hpp
 * @brief Input-to-plan: salient-word extraction and per-line keyword plans.
 *
 * Salient words are scored by term frequency times a first-occurrence weight
 * (2 - first_position / token_count), over non-stopword tokens of at least
 * three letters. Plans place the requested salient words round-robin across
 * lines and fill the remaining keyword slots with the words that co-occur most
 * with the keywords already placed.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunesmith/corpus.hpp"
#include "tunesmith/error.hpp"
#include "tunesmith/phonetics.hpp"
#include "tunesmith/text.hpp"
#include "tunesmith/wordlists.hpp"

namespace tunesmith {

inline bool is_content_word(std::string_view folded, const WordSet& stopwords) {
  std::size_t letters = 0;
  for (char c : folded) {
    if (is_ascii_alpha(c)) ++letters;
    else if (c != '\'') return false;
  }
  return letters >= 3 && !stopwords.contains(folded);
}

inline std::vector<std::string> extract_salient(std::string_view lyrics, std::size_t k,
                                                const WordSet& stopwords = builtin_stopwords()) {
  if (k == 0) throw Error(Errc::invalid_argument, "k must be >= 1");
  struct Stat {
    std::size_t tf = 0;
    std::size_t first = 0;
  };
  std::map<std::string, Stat> stats;
  std::size_t position = 0;
  for (auto line : split_lines(lyrics)) {
    for (auto& tok : tokenize(line)) {
      if (is_content_word(tok.folded, stopwords)) {
        auto [it, fresh] = stats.try_emplace(tok.folded, Stat{0, position});
        ++it->second.tf;
      }
      ++position;
    }
  }
  const double total = static_cast<double>(std::max<std::size_t>(position, 1));
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& [w, s] : stats) {
    double weight = 2.0 - static_cast<double>(s.first) / total;
    scored.emplace_back(static_cast<double>(s.tf) * weight, w);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
  return out;
}

/// Symmetric content-word co-occurrence counts within a +/-window inside each line.
class CooccurrenceTable {
 public:
  static constexpr std::size_t kDefaultWindow = 4;

  void add_line(std::string_view line, const WordSet& stopwords = builtin_stopwords(),
                std::size_t window = kDefaultWindow) {
    std::vector<std::string> content;
    for (auto& t : tokenize(line)) {
      if (is_content_word(t.folded, stopwords)) content.push_back(std::move(t.folded));
    }
    for (std::size_t i = 0; i < content.size(); ++i) {
      totals_[content[i]] += 0.0;
      for (std::size_t j = i + 1; j < content.size() && j <= i + window; ++j) {
        if (content[i] == content[j]) continue;
        add_pair(content[i], content[j], 1.0);
      }
    }
  }

  /// Builds from songs, keeping only those whose genre matches when a genre is given.
  static CooccurrenceTable build(const std::vector<Song>& songs, std::string_view genre = {},
                                 const WordSet& stopwords = builtin_stopwords(),
                                 std::size_t window = kDefaultWindow) {
    CooccurrenceTable t;
    const std::string g = to_lower(genre);
    for (const auto& song : songs) {
      if (!g.empty() && song.genre != g) continue;
      for (const auto& line : song.lines) t.add_line(line, stopwords, window);
    }
    return t;
  }

  double count(std::string_view a, std::string_view b) const {
    auto it = pairs_.find(std::string(a));
    if (it == pairs_.end()) return 0.0;
    auto jt = it->second.find(std::string(b));
    return jt == it->second.end() ? 0.0 : jt->second;
  }

  const std::map<std::string, double>& neighbours(std::string_view w) const {
    static const std::map<std::string, double> empty;
    auto it = pairs_.find(std::string(w));
    return it == pairs_.end() ? empty : it->second;
  }

  /// Every content word seen, with its total co-occurrence mass.
  const std::map<std::string, double>& words() const { return totals_; }

  bool empty() const { return totals_.empty(); }

  std::string serialize() const {
    std::ostringstream out;
    std::size_t n = 0;
    for (const auto& [a, row] : pairs_) {
      for (const auto& [b, c] : row) {
        if (a < b) ++n;
      }
    }
    out << "cooc " << totals_.size() << ' ' << n << "\n";
    for (const auto& [w, total] : totals_) out << w << "\n";
    for (const auto& [a, row] : pairs_) {
      for (const auto& [b, c] : row) {
        if (a < b) out << a << ' ' << b << ' ' << static_cast<std::uint64_t>(c) << "\n";
      }
    }
    return out.str();
  }

  static CooccurrenceTable parse(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) throw Error(Errc::parse, "co-occurrence table is empty");
    auto head = split_whitespace(lines[0]);
    if (head.size() != 3 || head[0] != "cooc") throw Error(Errc::parse, "not a co-occurrence table");
    std::size_t nw = 0;
    std::size_t np = 0;
    try {
      nw = std::stoul(std::string(head[1]));
      np = std::stoul(std::string(head[2]));
    } catch (...) {
      throw Error(Errc::parse, "co-occurrence header counts");
    }
    if (lines.size() < 1 + nw + np) throw Error(Errc::parse, "co-occurrence table truncated");
    CooccurrenceTable t;
    for (std::size_t i = 1; i <= nw; ++i) t.totals_[std::string(trim(lines[i]))] += 0.0;
    for (std::size_t i = 1 + nw; i < 1 + nw + np; ++i) {
      auto f = split_whitespace(lines[i]);
      if (f.size() != 3) throw Error(Errc::parse, "co-occurrence line " + std::to_string(i + 1));
      double c = 0;
      try {
        c = std::stod(std::string(f[2]));
      } catch (...) {
        throw Error(Errc::parse, "co-occurrence count on line " + std::to_string(i + 1));
      }
      t.add_pair(std::string(f[0]), std::string(f[1]), c);
    }
    return t;
  }

 private:
  void add_pair(const std::string& a, const std::string& b, double c) {
    pairs_[a][b] += c;
    pairs_[b][a] += c;
    totals_[a] += c;
    totals_[b] += c;
  }

  std::map<std::string, std::map<std::string, double>> pairs_;
  std::map<std::string, double> totals_;
};

struct GenerationRequest {
  std::string title;
  std::string genre;
  std::vector<std::string> salient_words;
  std::size_t num_lines = 1;
  std::size_t keywords_per_line = 1;

  void validate() const {
    if (num_lines < 1) throw Error(Errc::invalid_argument, "num_lines must be >= 1");
    if (keywords_per_line < 1) throw Error(Errc::invalid_argument, "keywords_per_line must be >= 1");
    if (salient_words.empty()) throw Error(Errc::invalid_argument, "at least one salient word is required");
    std::set<std::string> seen;
    for (const auto& w : salient_words) {
      if (fold(w).empty()) throw Error(Errc::invalid_argument, "empty salient word");
      if (!seen.insert(fold(w)).second) throw Error(Errc::invalid_argument, "duplicate salient word '" + w + "'");
    }
    if (salient_words.size() > num_lines * keywords_per_line) {
      throw Error(Errc::invalid_argument, "more salient words than keyword slots");
    }
  }
};

struct Plan {
  std::vector<std::vector<std::string>> lines;

  friend bool operator==(const Plan&, const Plan&) = default;
};

/// Lexicon, when given, restricts fill words to pronounceable entries.
inline Plan make_plan(const GenerationRequest& request, const CooccurrenceTable& cooc,
                      const Lexicon* lexicon = nullptr, const WordSet& stopwords = builtin_stopwords()) {
  request.validate();
  Plan plan;
  plan.lines.resize(request.num_lines);
  std::set<std::string> used;
  for (std::size_t j = 0; j < request.salient_words.size(); ++j) {
    std::string w = fold(request.salient_words[j]);
    plan.lines[j % request.num_lines].push_back(w);
    used.insert(w);
  }

  std::map<std::string, double> affinity;
  for (const auto& w : used) {
    for (const auto& [n, c] : cooc.neighbours(w)) affinity[n] += c;
  }
  auto eligible = [&](const std::string& w) {
    return !used.count(w) && is_content_word(w, stopwords) && (!lexicon || lexicon->contains(w));
  };

  std::vector<std::string> unfilled;
  for (std::size_t li = 0; li < plan.lines.size(); ++li) {
    auto& line = plan.lines[li];
    while (line.size() < request.keywords_per_line) {
      std::optional<std::string> best;
      double best_aff = -1.0;
      double best_mass = -1.0;
      for (const auto& [w, mass] : cooc.words()) {
        if (!eligible(w)) continue;
        auto it = affinity.find(w);
        double aff = it == affinity.end() ? 0.0 : it->second;
        if (aff > best_aff || (aff == best_aff && mass > best_mass)) {
          best = w;
          best_aff = aff;
          best_mass = mass;
        }
      }
      if (!best) {
        for (std::size_t k = line.size(); k < request.keywords_per_line; ++k) {
          unfilled.push_back("line " + std::to_string(li + 1) + " slot " + std::to_string(k + 1));
        }
        break;
      }
      line.push_back(*best);
      used.insert(*best);
      for (const auto& [n, c] : cooc.neighbours(*best)) affinity[n] += c;
    }
  }
  if (!unfilled.empty()) {
    throw Error(Errc::plan, "vocabulary too small, unfilled: " + join(unfilled, ", "));
  }
  return plan;
}

/// "Line 1: 8 syllables; Keywords: moon, river; Line 2: ..."
inline std::string render_plan(const Plan& plan, std::span<const std::size_t> budgets) {
  if (budgets.size() != plan.lines.size()) {
    throw Error(Errc::invalid_argument, "plan has " + std::to_string(plan.lines.size()) + " lines but " +
                                            std::to_string(budgets.size()) + " budgets");
  }
  std::vector<std::string> segments;
  for (std::size_t i = 0; i < plan.lines.size(); ++i) {
    std::string s = "Line " + std::to_string(i + 1) + ": " + std::to_string(budgets[i]) + " syllables; Keywords:";
    if (!plan.lines[i].empty()) s += " " + join(plan.lines[i], ", ");
    segments.push_back(std::move(s));
  }
  return join(segments, "; ");
}

inline std::string plan_to_json(const Plan& plan, const GenerationRequest* request = nullptr) {
  nlohmann::ordered_json doc;
  if (request) {
    doc["title"] = request->title;
    doc["genre"] = request->genre;
    doc["salient"] = request->salient_words;
  }
  doc["lines"] = plan.lines;
  return doc.dump(2) + "\n";
}

inline Plan parse_plan(std::string_view text) {
  Plan plan;
  try {
    auto doc = nlohmann::json::parse(text);
    plan.lines = doc.at("lines").get<std::vector<std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("plan file: ") + e.what());
  }
  return plan;
}

}  // namespace tunesmith
