/**
 * @file lm.hpp
 * @brief Next-word scoring interface consumed by the decoder.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tunesmith {

/// Line separator inside a history. Never offered as a candidate.
inline constexpr std::string_view kBoundary = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";
inline constexpr std::string_view kStart = "<s>";

struct Context {
  std::vector<std::string> history;  // previous words, lines separated by kBoundary
  std::size_t line_index = 0;
};

struct Candidate {
  std::string word;
  double logprob = 0.0;  // natural log

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Candidate order used by every scorer: logprob descending, then word.
inline bool candidate_before(const Candidate& a, const Candidate& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.word < b.word;
}

class Scorer {
 public:
  virtual ~Scorer() = default;

  /// Up to top_k complete words, sorted by candidate_before.
  virtual std::vector<Candidate> next_candidates(const Context& context, std::size_t top_k) const = 0;

  /// Sum of the stepwise conditionals that next_candidates reports.
  virtual double sequence_logprob(std::span<const std::string> words) const = 0;

  /// Conditional log probability of one word after the context.
  virtual double word_logprob(const Context& context, std::string_view word) const {
    std::vector<std::string> seq = context.history;
    double before = seq.empty() ? 0.0 : sequence_logprob(seq);
    seq.emplace_back(word);
    return sequence_logprob(seq) - before;
  }
};

}  // namespace tunesmith
