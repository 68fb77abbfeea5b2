/**
 * @file decoder.hpp
 * @brief Melody-guided constrained diverse beam search over complete words.
 *
 * Each step extends a hypothesis by one complete word. A word is admissible
 * when its syllable count fits what is left of the current phrase; its model
 * log probability is then reweighted by the rhythm rule:
 *
 *   adjusted = lp             if the word's stress matches the slot window
 *            = lp + ln(alpha) otherwise (alpha = 0 rejects the word)
 *
 * Unused plan keywords of the current line earn a flat log-space bonus.
 * Beams are split into groups; a group ranks its extensions by
 * score - lambda * (times earlier groups chose the same word this step).
 *
 * When a step has no admissible word the decoder falls back in order:
 *   1. widen top_k (doubling) until the vocabulary is exhausted,
 *   2. in hard mode, relax this one step to alpha = 0.01,
 *   3. admit any budget-fitting word, ignoring rhythm and the OOV policy,
 *   4. give up on the hypothesis.
 * Placements made at levels 2 and 3 count as violations.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tunesmith/error.hpp"
#include "tunesmith/lm.hpp"
#include "tunesmith/melody.hpp"
#include "tunesmith/phonetics.hpp"
#include "tunesmith/planner.hpp"

namespace tunesmith {

enum class OovPolicy { reject, penalize };

struct DecoderConfig {
  double alpha = 0.01;
  std::size_t beam_width = 8;
  std::size_t num_groups = 4;
  double diversity_strength = 0.5;
  std::size_t top_k = 50;
  double keyword_boost = 1.3862943611198906;  // ln 4
  std::uint64_t seed = 0;
  OovPolicy oov_policy = OovPolicy::reject;
  double relaxed_alpha = 0.01;
  std::size_t max_top_k = std::size_t{1} << 20;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::config, "alpha must be in [0,1]");
    if (beam_width < 1) throw Error(Errc::config, "beam_width must be >= 1");
    if (num_groups < 1) throw Error(Errc::config, "num_groups must be >= 1");
    if (beam_width % num_groups != 0) throw Error(Errc::config, "beam_width must be divisible by num_groups");
    if (!(diversity_strength >= 0.0)) throw Error(Errc::config, "diversity_strength must be >= 0");
    if (top_k < 1) throw Error(Errc::config, "top_k must be >= 1");
    if (!(keyword_boost >= 0.0)) throw Error(Errc::config, "keyword_boost must be >= 0");
    if (!(relaxed_alpha > 0.0 && relaxed_alpha <= 1.0)) throw Error(Errc::config, "relaxed_alpha must be in (0,1]");
  }

  bool hard() const { return alpha == 0.0; }
};

inline constexpr double kRejected = -std::numeric_limits<double>::infinity();

/// Finished hypotheses this close to the best score count as tied; the
/// lexicographically smallest text wins.
inline constexpr double kScoreTolerance = 1e-9;

/// Rhythm reweighting in log space. Returns kRejected when alpha is 0 and the
/// word does not satisfy the rhythm.
inline double adjusted_logprob(double lp, bool satisfied, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::config, "alpha must be in [0,1]");
  if (satisfied) return lp;
  if (alpha == 0.0) return kRejected;
  return lp + std::log(alpha);
}

/// True iff some pronunciation's stress equals the window. Monosyllables always
/// pass; out-of-vocabulary words never do.
inline bool rhythm_satisfied(std::string_view word, const Lexicon& lex, std::span<const Stress> window) {
  auto prons = lex.lookup(word);
  if (prons.empty()) return false;
  const std::size_t n = prons.front().syllable_count();
  if (window.size() != n) {
    throw Error(Errc::invalid_argument, "window of " + std::to_string(window.size()) + " marks for '" +
                                            std::string(word) + "' with " + std::to_string(n) + " syllables");
  }
  if (n == 1) return true;
  return std::any_of(prons.begin(), prons.end(), [&](const Pronunciation& p) {
    return std::equal(p.stress_pattern().begin(), p.stress_pattern().end(), window.begin(), window.end());
  });
}

struct PlacedWord {
  std::string word;
  std::size_t phrase = 0;
  std::size_t slot_begin = 0;
  std::size_t syllables = 0;
  double logprob = 0.0;
  double adjusted = 0.0;
  double bonus = 0.0;
  bool dictionary = true;
  bool satisfied = true;
  bool relaxed = false;
  int fallback_level = 0;
};

struct BeamHypothesis {
  std::vector<PlacedWord> words;
  std::size_t phrase_index = 0;
  std::size_t slot_cursor = 0;
  double score = 0.0;
  std::size_t violations = 0;
  std::set<std::pair<std::size_t, std::string>> plan_keywords_used;
  bool finished = false;

  Context context() const {
    Context ctx;
    std::size_t lines = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0 && words[i].phrase != words[i - 1].phrase) {
        ctx.history.emplace_back(kBoundary);
        ++lines;
      }
      ctx.history.push_back(words[i].word);
    }
    if (!words.empty() && (finished || phrase_index != words.back().phrase)) {
      ctx.history.emplace_back(kBoundary);
      ++lines;
    }
    ctx.line_index = lines;
    return ctx;
  }

  /// Words joined per line, lines separated by " / ". Used for deterministic tie-breaks.
  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) out += words[i].phrase != words[i - 1].phrase ? " / " : " ";
      out += words[i].word;
    }
    return out;
  }
};

struct LyricResult {
  std::vector<std::string> lines;  // one per phrase, empty for all-rest phrases
  std::vector<std::size_t> syllable_counts;
  double score = 0.0;
  std::size_t violations = 0;
  std::vector<PlacedWord> placements;
  std::size_t keywords_used = 0;
  std::size_t finished_hypotheses = 0;

  std::string text() const {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
  }
};

class Decoder {
 public:
  /// plan may have no lines (unconditioned); otherwise one line per phrase with a nonzero budget.
  Decoder(const ConstraintSet& constraints, const Lexicon& lexicon, const Scorer& lm, const Plan& plan,
          DecoderConfig config, std::ostream* trace = nullptr)
      : constraints_(constraints), lexicon_(lexicon), lm_(lm), config_(config), trace_(trace) {
    config_.validate();
    if (constraints_.rhythm.size() != constraints_.budgets.size()) {
      throw Error(Errc::invalid_argument, "constraint set budgets/rhythm length mismatch");
    }
    std::size_t active = 0;
    keywords_.resize(constraints_.budgets.size());
    for (std::size_t p = 0; p < constraints_.budgets.size(); ++p) {
      if (constraints_.rhythm[p].size() != constraints_.budgets[p]) {
        throw Error(Errc::invalid_argument, "phrase " + std::to_string(p) + " rhythm length != budget");
      }
      if (constraints_.budgets[p] == 0) continue;
      if (!plan.lines.empty() && active < plan.lines.size()) {
        for (const auto& k : plan.lines[active]) keywords_[p].push_back(fold(k));
      }
      ++active;
    }
    if (!plan.lines.empty() && plan.lines.size() != active) {
      throw Error(Errc::plan, "plan has " + std::to_string(plan.lines.size()) + " lines but the melody has " +
                                  std::to_string(active) + " singable phrases");
    }
  }

  BeamHypothesis initial() const {
    BeamHypothesis h;
    h.phrase_index = next_singable(0);
    h.finished = h.phrase_index >= constraints_.budgets.size();
    return h;
  }

  /// All admissible one-word extensions, after the fallback ladder. Empty means dead end.
  std::vector<BeamHypothesis> extend(const BeamHypothesis& hyp) const {
    if (hyp.finished) return {};
    const Context ctx = hyp.context();
    const auto keywords = unused_keywords(hyp);

    auto cands = candidates(ctx, config_.top_k, keywords);
    int level = 0;
    auto exts = admit(hyp, cands, keywords, config_.alpha, level);
    if (exts.empty()) {
      level = 1;
      std::size_t k = config_.top_k;
      while (exts.empty() && k < config_.max_top_k) {
        k = std::min(k * 2, config_.max_top_k);
        auto widened = lm_.next_candidates(ctx, k);
        const bool exhausted = widened.size() < k;
        cands = with_keywords(ctx, std::move(widened), keywords);
        exts = admit(hyp, cands, keywords, config_.alpha, level);
        if (exhausted) break;
      }
    }
    if (exts.empty() && config_.hard()) {
      level = 2;
      exts = admit(hyp, cands, keywords, config_.relaxed_alpha, level);
    }
    if (exts.empty()) {
      level = 3;
      exts = admit(hyp, cands, keywords, 1.0, level);
    }
    if (trace_) trace_extend(hyp, cands, exts, level);
    return exts;
  }

  LyricResult generate() const {
    const std::size_t groups_n = config_.num_groups;
    const std::size_t per_group = config_.beam_width / groups_n;
    std::vector<BeamHypothesis> finished;
    const BeamHypothesis start = initial();
    if (start.finished) return finalize(start, 1);

    std::vector<std::vector<BeamHypothesis>> groups(groups_n, std::vector<BeamHypothesis>{start});
    std::pair<std::size_t, std::size_t> furthest{start.phrase_index, 0};
    std::size_t step = 0;

    while (std::any_of(groups.begin(), groups.end(), [](const auto& g) { return !g.empty(); })) {
      std::map<std::string, std::size_t> chosen;  // word -> times picked by earlier groups this step
      for (std::size_t g = 0; g < groups_n; ++g) {
        if (groups[g].empty()) continue;
        std::vector<BeamHypothesis> exts;
        for (const auto& h : groups[g]) {
          furthest = std::max(furthest, std::pair{h.phrase_index, h.slot_cursor});
          auto e = extend(h);
          for (auto& x : e) exts.push_back(std::move(x));
        }
        struct Ranked {
          double key;
          std::string text;
          std::size_t index;
        };
        std::vector<Ranked> ranked;
        ranked.reserve(exts.size());
        for (std::size_t i = 0; i < exts.size(); ++i) {
          const auto& last = exts[i].words.back().word;
          auto it = chosen.find(last);
          const double penalty = it == chosen.end() ? 0.0 : config_.diversity_strength * static_cast<double>(it->second);
          ranked.push_back({exts[i].score - penalty, exts[i].text(), i});
        }
        std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
          if (a.key != b.key) return a.key > b.key;
          if (exts[a.index].score != exts[b.index].score) return exts[a.index].score > exts[b.index].score;
          return a.text < b.text;
        });
        std::vector<BeamHypothesis> next;
        std::vector<std::string> picked;
        for (const auto& r : ranked) {
          if (next.size() == per_group) break;
          auto& h = exts[r.index];
          picked.push_back(h.words.back().word);
          if (h.finished) finished.push_back(std::move(h));
          else next.push_back(std::move(h));
        }
        for (const auto& w : picked) ++chosen[w];
        if (trace_) trace_select(step, g, next, picked);
        groups[g] = std::move(next);
      }
      ++step;
    }

    if (finished.empty()) throw UnsatisfiableError(furthest.first, furthest.second);
    double top = kRejected;
    for (const auto& h : finished) top = std::max(top, h.score);
    const BeamHypothesis* best = nullptr;
    for (const auto& h : finished) {
      if (h.score < top - kScoreTolerance) continue;
      if (!best || h.text() < best->text()) best = &h;
    }
    return finalize(*best, finished.size());
  }

  const DecoderConfig& config() const { return config_; }

 private:
  std::size_t next_singable(std::size_t from) const {
    while (from < constraints_.budgets.size() && constraints_.budgets[from] == 0) ++from;
    return from;
  }

  std::vector<std::string> unused_keywords(const BeamHypothesis& hyp) const {
    std::vector<std::string> out;
    for (const auto& k : keywords_[hyp.phrase_index]) {
      if (!hyp.plan_keywords_used.count({hyp.phrase_index, k})) out.push_back(k);
    }
    return out;
  }

  std::vector<Candidate> with_keywords(const Context& ctx, std::vector<Candidate> cands,
                                       const std::vector<std::string>& keywords) const {
    for (const auto& k : keywords) {
      bool present = std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) { return c.word == k; });
      if (!present) cands.push_back(Candidate{k, lm_.word_logprob(ctx, k)});
    }
    return cands;
  }

  std::vector<Candidate> candidates(const Context& ctx, std::size_t k, const std::vector<std::string>& keywords) const {
    return with_keywords(ctx, lm_.next_candidates(ctx, k), keywords);
  }

  std::vector<BeamHypothesis> admit(const BeamHypothesis& hyp, const std::vector<Candidate>& cands,
                                    const std::vector<std::string>& keywords, double alpha, int level) const {
    const std::size_t p = hyp.phrase_index;
    const std::size_t remaining = constraints_.budgets[p] - hyp.slot_cursor;
    std::vector<BeamHypothesis> out;
    std::set<std::string> seen;
    for (const auto& c : cands) {
      if (c.word.empty() || c.word == kBoundary || c.word == kUnknown || c.word == kStart) continue;
      if (std::any_of(c.word.begin(), c.word.end(), is_space)) continue;
      if (!seen.insert(c.word).second) continue;
      auto count = try_count_syllables(lexicon_, c.word);
      if (!count || count->count == 0) continue;
      const bool known = count->provenance == Provenance::dictionary && !lexicon_.lookup(c.word).empty();
      if (!known && config_.oov_policy == OovPolicy::reject && level < 3) continue;
      if (count->count > remaining) continue;

      std::span<const Stress> window(constraints_.rhythm[p].data() + hyp.slot_cursor, count->count);
      const bool sat = known && rhythm_satisfied(c.word, lexicon_, window);
      double adj = level == 3 ? c.logprob : adjusted_logprob(c.logprob, sat, alpha);
      if (adj == kRejected) continue;

      PlacedWord w;
      w.word = c.word;
      w.phrase = p;
      w.slot_begin = hyp.slot_cursor;
      w.syllables = count->count;
      w.logprob = c.logprob;
      w.adjusted = adj;
      w.dictionary = known;
      w.satisfied = sat;
      w.relaxed = level >= 2;
      w.fallback_level = level;
      if (std::find(keywords.begin(), keywords.end(), c.word) != keywords.end()) w.bonus = config_.keyword_boost;

      BeamHypothesis h = hyp;
      h.score += w.adjusted + w.bonus;
      if (w.relaxed) ++h.violations;
      if (w.bonus > 0.0 || std::find(keywords.begin(), keywords.end(), c.word) != keywords.end()) {
        h.plan_keywords_used.insert({p, c.word});
      }
      h.slot_cursor += w.syllables;
      h.words.push_back(std::move(w));
      if (h.slot_cursor == constraints_.budgets[p]) {
        h.phrase_index = next_singable(p + 1);
        h.slot_cursor = 0;
        h.finished = h.phrase_index >= constraints_.budgets.size();
      }
      out.push_back(std::move(h));
    }
    return out;
  }

  LyricResult finalize(const BeamHypothesis& best, std::size_t finished_count) const {
    LyricResult r;
    r.lines.assign(constraints_.budgets.size(), "");
    for (const auto& w : best.words) {
      auto& line = r.lines[w.phrase];
      if (!line.empty()) line += ' ';
      line += w.word;
      if (w.bonus > 0.0) ++r.keywords_used;
    }
    for (std::size_t p = 0; p < r.lines.size(); ++p) {
      const std::size_t n = count_syllables_line(lexicon_, r.lines[p]);
      if (n != constraints_.budgets[p]) {
        throw Error(Errc::alignment, "line " + std::to_string(p + 1) + " has " + std::to_string(n) +
                                         " syllables, budget " + std::to_string(constraints_.budgets[p]));
      }
      r.syllable_counts.push_back(n);
    }
    r.score = best.score;
    r.violations = best.violations;
    r.placements = best.words;
    r.finished_hypotheses = finished_count;
    return r;
  }

  void trace_extend(const BeamHypothesis& hyp, const std::vector<Candidate>& cands,
                    const std::vector<BeamHypothesis>& exts, int level) const {
    nlohmann::ordered_json j;
    j["event"] = "extend";
    j["prefix"] = hyp.text();
    j["phrase"] = hyp.phrase_index;
    j["slot"] = hyp.slot_cursor;
    j["fallback"] = level;
    j["candidates"] = cands.size();
    nlohmann::ordered_json admitted = nlohmann::ordered_json::array();
    for (const auto& e : exts) {
      const auto& w = e.words.back();
      std::string window;
      for (std::size_t k = 0; k < w.syllables; ++k) window += stress_char(constraints_.rhythm[w.phrase][w.slot_begin + k]);
      admitted.push_back({{"word", w.word},
                          {"window", window},
                          {"logprob", w.logprob},
                          {"adjusted", w.adjusted},
                          {"bonus", w.bonus},
                          {"satisfied", w.satisfied},
                          {"relaxed", w.relaxed}});
    }
    j["admitted"] = std::move(admitted);
    *trace_ << j.dump() << "\n";
  }

  void trace_select(std::size_t step, std::size_t group, const std::vector<BeamHypothesis>& beam,
                    const std::vector<std::string>& picked) const {
    nlohmann::ordered_json j;
    j["event"] = "select";
    j["step"] = step;
    j["group"] = group;
    j["picked"] = picked;
    nlohmann::ordered_json b = nlohmann::ordered_json::array();
    for (const auto& h : beam) b.push_back({{"text", h.text()}, {"score", h.score}});
    j["beam"] = std::move(b);
    *trace_ << j.dump() << "\n";
  }

  const ConstraintSet& constraints_;
  const Lexicon& lexicon_;
  const Scorer& lm_;
  DecoderConfig config_;
  std::ostream* trace_;
  std::vector<std::vector<std::string>> keywords_;  // per phrase
};

inline LyricResult generate(const Plan& plan, const ConstraintSet& constraints, const Lexicon& lexicon,
                            const Scorer& lm, const DecoderConfig& config, std::ostream* trace = nullptr) {
  return Decoder(constraints, lexicon, lm, plan, config, trace).generate();
}

}  // namespace tunesmith
