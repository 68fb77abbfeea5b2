/**
 * @file metrics.hpp
 * @brief Automatic lyric evaluation: topic relevance, diversity, fluency,
 *        cropped-line ratio and stress-duration alignment.
 *
 * Ratios are fractions in [0,1]. A metric that cannot be computed for its
 * inputs is std::nullopt and is reported as "n/a".
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunesmith/error.hpp"
#include "tunesmith/melody.hpp"
#include "tunesmith/ngram.hpp"
#include "tunesmith/phonetics.hpp"
#include "tunesmith/text.hpp"
#include "tunesmith/wordlists.hpp"

namespace tunesmith {

using Lines = std::vector<std::string>;

namespace detail {

using Gram = std::vector<std::string>;

inline std::map<Gram, std::size_t> ngram_counts(const std::vector<std::string>& words, std::size_t n) {
  std::map<Gram, std::size_t> out;
  if (words.size() < n) return out;
  for (std::size_t i = 0; i + n <= words.size(); ++i) ++out[Gram(words.begin() + i, words.begin() + i + n)];
  return out;
}

}  // namespace detail

/// Unique n-grams over total n-grams. n-grams do not cross line breaks.
inline std::optional<double> distinct_n(const Lines& lines, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be >= 1");
  std::set<detail::Gram> unique;
  std::size_t total = 0;
  for (const auto& line : lines) {
    auto words = folded_words(line);
    for (const auto& [g, c] : detail::ngram_counts(words, n)) {
      unique.insert(g);
      total += c;
    }
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

/// Fraction of salient words that occur in the lyrics (case-folded exact match).
inline double salient_coverage(const Lines& lyrics, const std::vector<std::string>& salient) {
  if (salient.empty()) throw Error(Errc::invalid_argument, "salient word list is empty");
  std::set<std::string> present;
  for (const auto& line : lyrics) {
    for (auto& w : folded_words(line)) present.insert(std::move(w));
  }
  std::size_t hit = 0;
  for (const auto& s : salient) {
    if (present.count(fold(s))) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(salient.size());
}

enum class BleuMode { sentence, corpus };

namespace detail {

struct BleuStats {
  std::array<double, 4> matched{};
  std::array<double, 4> total{};
  double cand_len = 0.0;
  double ref_len = 0.0;

  void add(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
    cand_len += static_cast<double>(cand.size());
    ref_len += static_cast<double>(ref.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      auto c = ngram_counts(cand, n);
      auto r = ngram_counts(ref, n);
      for (const auto& [g, k] : c) {
        auto it = r.find(g);
        matched[n - 1] += static_cast<double>(std::min(k, it == r.end() ? std::size_t{0} : it->second));
        total[n - 1] += static_cast<double>(k);
      }
    }
  }

  double brevity() const {
    if (cand_len == 0.0) return 0.0;
    if (cand_len > ref_len) return 1.0;
    return std::exp(1.0 - ref_len / cand_len);
  }
};

}  // namespace detail

/// BLEU-4 with brevity penalty.
/// Sentence mode: add-one smoothed precisions per aligned line, averaged.
/// Corpus mode: unsmoothed, statistics pooled over lines; orders with no
/// candidate n-grams at all are left out of the geometric mean.
inline double bleu(const Lines& candidate, const Lines& references, BleuMode mode) {
  if (references.empty()) throw Error(Errc::invalid_argument, "BLEU needs references");
  if (candidate.empty()) throw Error(Errc::invalid_argument, "BLEU needs a candidate");
  if (mode == BleuMode::sentence) {
    if (candidate.size() != references.size()) {
      throw Error(Errc::invalid_argument, "sentence BLEU needs one reference line per candidate line");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      detail::BleuStats s;
      s.add(folded_words(candidate[i]), folded_words(references[i]));
      double log_p = 0.0;
      for (std::size_t n = 0; n < 4; ++n) log_p += std::log((s.matched[n] + 1.0) / (s.total[n] + 1.0));
      sum += s.brevity() * std::exp(log_p / 4.0);
    }
    return sum / static_cast<double>(candidate.size());
  }
  detail::BleuStats s;
  if (candidate.size() == references.size()) {
    for (std::size_t i = 0; i < candidate.size(); ++i) s.add(folded_words(candidate[i]), folded_words(references[i]));
  } else {
    std::vector<std::string> c;
    std::vector<std::string> r;
    for (const auto& l : candidate) for (auto& w : folded_words(l)) c.push_back(std::move(w));
    for (const auto& l : references) for (auto& w : folded_words(l)) r.push_back(std::move(w));
    s.add(c, r);
  }
  double log_p = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (s.total[n] == 0.0) continue;
    if (s.matched[n] == 0.0) return 0.0;
    log_p += std::log(s.matched[n] / s.total[n]);
    ++orders;
  }
  if (orders == 0) return 0.0;
  return s.brevity() * std::exp(log_p / static_cast<double>(orders));
}

/// A line is cropped when its last word is a dangling function word.
inline bool is_cropped(std::string_view line, const WordSet& dangling = builtin_dangling()) {
  auto words = folded_words(line);
  return !words.empty() && dangling.contains(words.back());
}

inline double cropped_ratio(const Lines& lyrics, const WordSet& dangling = builtin_dangling()) {
  if (lyrics.empty()) throw Error(Errc::invalid_argument, "no lines");
  std::size_t n = 0;
  for (const auto& l : lyrics) {
    if (is_cropped(l, dangling)) ++n;
  }
  return static_cast<double>(n) / static_cast<double>(lyrics.size());
}

struct AlignmentCount {
  std::size_t matched = 0;
  std::size_t counted = 0;

  std::optional<double> ratio() const {
    if (counted == 0) return std::nullopt;
    return static_cast<double>(matched) / static_cast<double>(counted);
  }
};

/// Counts syllable positions of polysyllabic dictionary words whose stress
/// equals the rhythm mark. Each word uses its best-matching pronunciation among
/// those with the canonical syllable count.
/// `lyrics` has one line per phrase, or one per phrase with a nonzero budget.
inline AlignmentCount stress_duration_alignment(const Lines& lyrics, const ConstraintSet& constraints,
                                                const Lexicon& lex) {
  std::vector<std::size_t> phrases;
  if (lyrics.size() == constraints.budgets.size()) {
    for (std::size_t i = 0; i < lyrics.size(); ++i) phrases.push_back(i);
  } else {
    for (std::size_t i = 0; i < constraints.budgets.size(); ++i) {
      if (constraints.budgets[i] > 0) phrases.push_back(i);
    }
    if (phrases.size() != lyrics.size()) {
      throw Error(Errc::alignment, std::to_string(lyrics.size()) + " lyric lines for " +
                                       std::to_string(constraints.budgets.size()) + " phrases");
    }
  }
  AlignmentCount out;
  for (std::size_t li = 0; li < lyrics.size(); ++li) {
    const std::size_t p = phrases[li];
    const auto& rhythm = constraints.rhythm[p];
    const std::size_t n = count_syllables_line(lex, lyrics[li]);
    if (n != constraints.budgets[p]) {
      throw Error(Errc::alignment, "line " + std::to_string(li + 1) + " has " + std::to_string(n) +
                                       " syllables, budget " + std::to_string(constraints.budgets[p]));
    }
    std::size_t pos = 0;
    for (const auto& tok : tokenize(lyrics[li])) {
      auto prons = lex.lookup(tok.surface);
      const std::size_t len = prons.empty() ? estimate_syllables(tok.surface) : prons.front().syllable_count();
      if (!prons.empty() && len > 1) {
        std::size_t best = 0;
        for (const auto& pr : prons) {
          if (pr.syllable_count() != len) continue;
          std::size_t m = 0;
          for (std::size_t k = 0; k < len; ++k) m += pr.stress_pattern()[k] == rhythm[pos + k];
          best = std::max(best, m);
        }
        out.matched += best;
        out.counted += len;
      }
      pos += len;
    }
  }
  return out;
}

inline std::optional<double> stress_duration_pct(const Lines& lyrics, const ConstraintSet& constraints,
                                                 const Lexicon& lex) {
  return stress_duration_alignment(lyrics, constraints, lex).ratio();
}

struct EvalReport {
  std::optional<double> salient_coverage;
  std::optional<double> sentence_bleu;
  std::optional<double> corpus_bleu;
  std::optional<double> dist1;
  std::optional<double> dist2;
  std::optional<double> perplexity;
  std::optional<double> cropped_ratio;
  std::optional<double> stress_duration_pct;

  std::vector<std::pair<std::string, std::optional<double>>> fields() const {
    return {{"salient_coverage", salient_coverage}, {"sentence_bleu", sentence_bleu},
            {"corpus_bleu", corpus_bleu},           {"dist1", dist1},
            {"dist2", dist2},                       {"perplexity", perplexity},
            {"cropped_ratio", cropped_ratio},       {"stress_duration_pct", stress_duration_pct}};
  }

  bool complete() const {
    auto f = fields();
    return std::all_of(f.begin(), f.end(), [](const auto& kv) { return kv.second.has_value(); });
  }

  std::string to_json() const {
    nlohmann::ordered_json doc;
    for (const auto& [k, v] : fields()) doc[k] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json("n/a");
    return doc.dump(2) + "\n";
  }

  std::string to_table() const {
    std::ostringstream out;
    for (const auto& [k, v] : fields()) {
      out << std::left << std::setw(22) << k;
      if (!v) out << "n/a";
      else if (k == "perplexity") out << std::fixed << std::setprecision(3) << *v;
      else out << std::fixed << std::setprecision(4) << *v;
      out << "\n";
    }
    return out.str();
  }
};

struct EvalInputs {
  Lines candidate;
  std::vector<std::string> salient;
  const Lines* references = nullptr;
  const ConstraintSet* constraints = nullptr;
  const Lexicon* lexicon = nullptr;
  const NGramModel* lm = nullptr;
  const WordSet* dangling = nullptr;
};

inline EvalReport evaluate(const EvalInputs& in) {
  EvalReport r;
  Lines sung;
  for (const auto& l : in.candidate) {
    if (!trim(l).empty()) sung.push_back(l);
  }
  if (!in.salient.empty()) r.salient_coverage = salient_coverage(in.candidate, in.salient);
  if (in.references && !in.references->empty() && !sung.empty()) {
    if (sung.size() == in.references->size()) r.sentence_bleu = bleu(sung, *in.references, BleuMode::sentence);
    r.corpus_bleu = bleu(sung, *in.references, BleuMode::corpus);
  }
  r.dist1 = distinct_n(in.candidate, 1);
  r.dist2 = distinct_n(in.candidate, 2);
  if (in.lm) {
    std::string text = join(sung, "\n");
    if (!folded_words(text).empty()) r.perplexity = perplexity(*in.lm, text);
  }
  if (!sung.empty()) r.cropped_ratio = cropped_ratio(sung, in.dangling ? *in.dangling : builtin_dangling());
  if (in.constraints && in.lexicon) {
    r.stress_duration_pct = stress_duration_pct(in.candidate, *in.constraints, *in.lexicon);
  }
  return r;
}

}  // namespace tunesmith
