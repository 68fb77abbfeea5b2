/**
 * @file ngram.hpp
 * @brief Word n-gram model with add-k or interpolated Kneser-Ney smoothing.
 *
 * Events are the vocabulary words, <unk> and the end-of-line boundary </s>.
 * Lines are modelled independently; each history is padded with <s>.
 *
 * next_candidates reports the word distribution conditioned on the line
 * continuing, i.e. P(w | h) / (1 - P(</s> | h)), because the decoder ends lines
 * from the melody's syllable budget rather than from the model. Perplexity
 * uses the unconditioned event distribution and counts the boundaries.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tunesmith/error.hpp"
#include "tunesmith/lm.hpp"
#include "tunesmith/text.hpp"

namespace tunesmith {

enum class Smoothing { add_k, kneser_ney };

struct NGramConfig {
  int order = 3;
  Smoothing smoothing = Smoothing::kneser_ney;
  double k = 1.0;           // add-k constant
  double discount = 0.75;   // absolute discount for Kneser-Ney
  std::size_t min_count = 2;

  void validate() const {
    if (order < 1 || order > 5) throw Error(Errc::config, "n-gram order must be in [1,5]");
    if (smoothing == Smoothing::add_k && !(k > 0.0)) throw Error(Errc::config, "add-k constant must be > 0");
    if (smoothing == Smoothing::kneser_ney && !(discount > 0.0 && discount < 1.0)) {
      throw Error(Errc::config, "discount must be in (0,1)");
    }
    if (min_count < 1) throw Error(Errc::config, "min_count must be >= 1");
  }
};

class NGramModel : public Scorer {
 public:
  static constexpr int kBoundaryId = 0;
  static constexpr int kUnknownId = 1;

  /// Trains on text lines (one lyric line each). Blank lines are ignored.
  static NGramModel train(const std::vector<std::string>& lines, const NGramConfig& config) {
    config.validate();
    std::vector<std::vector<std::string>> tokenized;
    std::map<std::string, std::size_t> freq;
    for (const auto& line : lines) {
      auto words = folded_words(line);
      if (words.empty()) continue;
      for (const auto& w : words) ++freq[w];
      tokenized.push_back(std::move(words));
    }
    if (tokenized.empty()) throw Error(Errc::training, "corpus has no words");

    NGramModel m;
    m.config_ = config;
    for (const auto& [w, c] : freq) {
      if (c >= config.min_count && w != kBoundary && w != kUnknown && w != kStart) m.words_.push_back(w);
    }
    m.index_vocabulary();

    const int start = m.start_id();
    for (const auto& words : tokenized) {
      std::vector<int> seq(static_cast<std::size_t>(config.order - 1), start);
      for (const auto& w : words) seq.push_back(m.id_of(w));
      seq.push_back(kBoundaryId);
      for (std::size_t t = static_cast<std::size_t>(config.order - 1); t < seq.size(); ++t) {
        std::vector<int> gram(seq.begin() + static_cast<std::ptrdiff_t>(t + 1 - config.order),
                              seq.begin() + static_cast<std::ptrdiff_t>(t + 1));
        m.grams_[gram] += 1.0;
      }
    }
    m.build_levels();
    return m;
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "tunesmith-ngram 1\n";
    out << "order " << config_.order << "\n";
    if (config_.smoothing == Smoothing::add_k) {
      out << "smoothing add-k " << format_double(config_.k) << "\n";
    } else {
      out << "smoothing kneser-ney " << format_double(config_.discount) << "\n";
    }
    out << "min_count " << config_.min_count << "\n";
    out << "vocab " << words_.size() << "\n";
    for (const auto& w : words_) out << w << "\n";
    out << "ngrams " << grams_.size() << "\n";
    for (const auto& [gram, count] : grams_) {
      out << static_cast<std::uint64_t>(count);
      for (int id : gram) out << ' ' << token_of(id);
      out << "\n";
    }
    return out.str();
  }

  static NGramModel parse(std::string_view text) {
    auto lines = split_lines(text);
    std::size_t i = 0;
    auto next = [&](std::string_view what) -> std::vector<std::string_view> {
      if (i >= lines.size()) throw Error(Errc::parse, "model file truncated before " + std::string(what));
      return split_whitespace(lines[i++]);
    };
    auto number = [](std::string_view s) {
      try {
        return std::stod(std::string(s));
      } catch (...) {
        throw Error(Errc::parse, "model file: bad number '" + std::string(s) + "'");
      }
    };
    NGramModel m;
    auto head = next("header");
    if (head.size() != 2 || head[0] != "tunesmith-ngram" || head[1] != "1") {
      throw Error(Errc::parse, "not a tunesmith n-gram model");
    }
    auto f = next("order");
    if (f.size() != 2 || f[0] != "order") throw Error(Errc::parse, "model file: expected order");
    m.config_.order = static_cast<int>(number(f[1]));
    f = next("smoothing");
    if (f.size() != 3 || f[0] != "smoothing") throw Error(Errc::parse, "model file: expected smoothing");
    if (f[1] == "add-k") {
      m.config_.smoothing = Smoothing::add_k;
      m.config_.k = number(f[2]);
    } else if (f[1] == "kneser-ney") {
      m.config_.smoothing = Smoothing::kneser_ney;
      m.config_.discount = number(f[2]);
    } else {
      throw Error(Errc::parse, "model file: unknown smoothing");
    }
    f = next("min_count");
    if (f.size() != 2 || f[0] != "min_count") throw Error(Errc::parse, "model file: expected min_count");
    m.config_.min_count = static_cast<std::size_t>(number(f[1]));
    try {
      m.config_.validate();
    } catch (const Error& e) {
      throw Error(Errc::parse, std::string("model file: ") + e.what());
    }
    f = next("vocab");
    if (f.size() != 2 || f[0] != "vocab") throw Error(Errc::parse, "model file: expected vocab");
    const auto nv = static_cast<std::size_t>(number(f[1]));
    for (std::size_t k = 0; k < nv; ++k) {
      auto w = next("vocabulary word");
      if (w.size() != 1) throw Error(Errc::parse, "model file: bad vocabulary line");
      m.words_.emplace_back(w[0]);
    }
    m.index_vocabulary();
    f = next("ngrams");
    if (f.size() != 2 || f[0] != "ngrams") throw Error(Errc::parse, "model file: expected ngrams");
    const auto ng = static_cast<std::size_t>(number(f[1]));
    for (std::size_t k = 0; k < ng; ++k) {
      auto g = next("n-gram");
      if (g.size() != static_cast<std::size_t>(m.config_.order) + 1) {
        throw Error(Errc::parse, "model file: n-gram line has wrong arity");
      }
      std::vector<int> gram;
      for (std::size_t j = 1; j < g.size(); ++j) {
        if (g[j] == kStart) gram.push_back(m.start_id());
        else if (auto it = m.ids_.find(std::string(g[j])); it != m.ids_.end()) gram.push_back(it->second);
        else throw Error(Errc::parse, "model file: token '" + std::string(g[j]) + "' not in vocabulary");
      }
      m.grams_[gram] += number(g[0]);
    }
    m.build_levels();
    return m;
  }

  const NGramConfig& config() const { return config_; }
  int order() const { return config_.order; }

  /// Vocabulary words, excluding <unk> and </s>.
  const std::vector<std::string>& vocabulary() const { return words_; }
  std::size_t vocabulary_size() const { return words_.size(); }
  std::size_t event_count() const { return words_.size() + 2; }

  bool in_vocabulary(std::string_view w) const {
    auto it = ids_.find(std::string(w));
    return it != ids_.end() && it->second >= 2;
  }

  /// Unconditioned P(event | history) over words, <unk> and </s>.
  double probability(const std::vector<std::string>& history, std::string_view event) const {
    return event_probability(history_ids(history), id_of(event));
  }

  std::vector<Candidate> next_candidates(const Context& context, std::size_t top_k) const override {
    if (top_k == 0) return {};
    auto dist = distribution(history_ids(context.history));
    const double log_continue = std::log1p(-dist[kBoundaryId]);
    std::vector<Candidate> all;
    all.reserve(dist.size() - 1);
    for (std::size_t id = 1; id < dist.size(); ++id) {
      all.push_back(Candidate{token_of(static_cast<int>(id)), std::log(dist[id]) - log_continue});
    }
    const std::size_t k = std::min(top_k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), candidate_before);
    all.resize(k);
    return all;
  }

  double sequence_logprob(std::span<const std::string> words) const override {
    double total = 0.0;
    std::vector<int> line;
    for (const auto& w : words) {
      if (w == kBoundary) {
        line.clear();
        continue;
      }
      const int id = id_of(w);
      total += continuing_logprob(padded(line), id);
      line.push_back(id);
    }
    return total;
  }

  double word_logprob(const Context& context, std::string_view word) const override {
    if (word == kBoundary) return 0.0;
    return continuing_logprob(history_ids(context.history), id_of(word));
  }

  /// exp(-(sum of event log probs) / tokens), each nonblank line closed by </s>.
  friend double perplexity(const NGramModel& model, std::string_view text) {
    double lp = 0.0;
    std::size_t tokens = 0;
    for (auto line : split_lines(text)) {
      auto words = folded_words(line);
      if (words.empty()) continue;
      std::vector<int> ids;
      for (const auto& w : words) {
        const int id = model.id_of(w);
        lp += std::log(model.event_probability(model.padded(ids), id));
        ids.push_back(id);
      }
      lp += std::log(model.event_probability(model.padded(ids), kBoundaryId));
      tokens += words.size() + 1;
    }
    if (tokens == 0) throw Error(Errc::invalid_argument, "perplexity needs at least one word");
    return std::exp(-lp / static_cast<double>(tokens));
  }

 private:
  struct Stats {
    std::vector<std::pair<int, double>> counts;  // sorted by id
    double total = 0.0;

    double count_of(int id) const {
      auto it = std::lower_bound(counts.begin(), counts.end(), id,
                                 [](const auto& p, int v) { return p.first < v; });
      return it != counts.end() && it->first == id ? it->second : 0.0;
    }
  };

  struct KeyHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (int x : v) {
        h ^= static_cast<std::size_t>(static_cast<unsigned>(x));
        h *= 1099511628211ull;
      }
      return h;
    }
  };

  using Level = std::unordered_map<std::vector<int>, Stats, KeyHash>;

  static std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  }

  int start_id() const { return static_cast<int>(words_.size()) + 2; }

  void index_vocabulary() {
    ids_.clear();
    ids_.emplace(std::string(kBoundary), kBoundaryId);
    ids_.emplace(std::string(kUnknown), kUnknownId);
    for (std::size_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], static_cast<int>(i) + 2);
  }

  int id_of(std::string_view w) const {
    auto it = ids_.find(std::string(w));
    if (it != ids_.end()) return it->second;
    it = ids_.find(fold(w));
    return it == ids_.end() || it->second < 2 ? kUnknownId : it->second;
  }

  std::string token_of(int id) const {
    if (id == kBoundaryId) return std::string(kBoundary);
    if (id == kUnknownId) return std::string(kUnknown);
    if (id == start_id()) return std::string(kStart);
    return words_[static_cast<std::size_t>(id - 2)];
  }

  std::vector<int> padded(const std::vector<int>& line) const {
    const auto n = static_cast<std::size_t>(config_.order - 1);
    std::vector<int> h(n, start_id());
    const std::size_t take = std::min(n, line.size());
    std::copy(line.end() - static_cast<std::ptrdiff_t>(take), line.end(), h.end() - static_cast<std::ptrdiff_t>(take));
    return h;
  }

  std::vector<int> history_ids(const std::vector<std::string>& history) const {
    std::vector<int> line;
    for (const auto& w : history) {
      if (w == kBoundary) line.clear();
      else line.push_back(id_of(w));
    }
    return padded(line);
  }

  void build_levels() {
    const auto order = static_cast<std::size_t>(config_.order);
    std::vector<std::unordered_map<std::vector<int>, std::map<int, double>, KeyHash>> raw(order);
    for (const auto& [gram, count] : grams_) {
      std::vector<int> h(gram.begin(), gram.end() - 1);
      raw[order - 1][h][gram.back()] += count;
    }
    if (config_.smoothing == Smoothing::kneser_ney) {
      for (std::size_t m = order - 1; m-- > 0;) {
        for (const auto& [h, counts] : raw[m + 1]) {
          std::vector<int> shorter(h.begin() + 1, h.end());
          for (const auto& [w, c] : counts) {
            if (c > 0) raw[m][shorter][w] += 1.0;
          }
        }
      }
    }
    levels_.assign(order, Level{});
    for (std::size_t m = 0; m < order; ++m) {
      for (auto& [h, counts] : raw[m]) {
        Stats s;
        for (const auto& [w, c] : counts) {
          s.counts.emplace_back(w, c);
          s.total += c;
        }
        levels_[m].emplace(h, std::move(s));
      }
    }
  }

  const Stats* find(std::size_t level, const std::vector<int>& padded_history) const {
    std::vector<int> key(padded_history.end() - static_cast<std::ptrdiff_t>(level), padded_history.end());
    auto it = levels_[level].find(key);
    if (it == levels_[level].end() || it->second.total <= 0.0) return nullptr;
    return &it->second;
  }

  std::vector<double> distribution(const std::vector<int>& h) const {
    const std::size_t events = event_count();
    std::vector<double> p(events, 1.0 / static_cast<double>(events));
    if (config_.smoothing == Smoothing::add_k) {
      const Stats* s = find(levels_.size() - 1, h);
      const double total = s ? s->total : 0.0;
      const double denom = total + config_.k * static_cast<double>(events);
      std::fill(p.begin(), p.end(), config_.k / denom);
      if (s) {
        for (const auto& [w, c] : s->counts) p[static_cast<std::size_t>(w)] += c / denom;
      }
      return p;
    }
    const double d = config_.discount;
    for (std::size_t m = 0; m < levels_.size(); ++m) {
      const Stats* s = find(m, h);
      if (!s) continue;
      const double gamma = d * static_cast<double>(s->counts.size()) / s->total;
      for (double& x : p) x *= gamma;
      for (const auto& [w, c] : s->counts) p[static_cast<std::size_t>(w)] += std::max(c - d, 0.0) / s->total;
    }
    return p;
  }

  double event_probability(const std::vector<int>& h, int id) const {
    const double uniform = 1.0 / static_cast<double>(event_count());
    if (config_.smoothing == Smoothing::add_k) {
      const Stats* s = find(levels_.size() - 1, h);
      const double total = s ? s->total : 0.0;
      const double c = s ? s->count_of(id) : 0.0;
      return (c + config_.k) / (total + config_.k * static_cast<double>(event_count()));
    }
    const double d = config_.discount;
    double p = uniform;
    for (std::size_t m = 0; m < levels_.size(); ++m) {
      const Stats* s = find(m, h);
      if (!s) continue;
      const double gamma = d * static_cast<double>(s->counts.size()) / s->total;
      p = std::max(s->count_of(id) - d, 0.0) / s->total + gamma * p;
    }
    return p;
  }

  double continuing_logprob(const std::vector<int>& h, int id) const {
    return std::log(event_probability(h, id)) - std::log1p(-event_probability(h, kBoundaryId));
  }

  NGramConfig config_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
  std::map<std::vector<int>, double> grams_;
  std::vector<Level> levels_;
};

inline NGramModel train_ngram(const std::vector<std::string>& lines, const NGramConfig& config) {
  return NGramModel::train(lines, config);
}

}  // namespace tunesmith
