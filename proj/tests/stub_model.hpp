// Deterministic toy scorer shared by the stub bridge process and the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tunesmith/lm.hpp"

namespace stub {

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v{"moon", "river", "wider", "than", "a",    "mile",  "heart",
                                          "town", "spanish", "kisses", "night", "day", "dreams", "true"};
  return v;
}

inline std::uint64_t mix(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

/// Bigram-like model: P(w | prev) proportional to 1 + hash(prev, w) % 97.
class Model : public tunesmith::Scorer {
 public:
  std::vector<double> distribution(const std::string& prev) const {
    std::vector<double> w;
    double total = 0;
    for (const auto& v : vocabulary()) {
      w.push_back(1.0 + static_cast<double>(mix(prev + "|" + v) % 97));
      total += w.back();
    }
    for (auto& x : w) x = std::log(x / total);
    return w;
  }

  std::vector<tunesmith::Candidate> next_candidates(const tunesmith::Context& ctx, std::size_t top_k) const override {
    const auto lp = distribution(previous(ctx.history));
    std::vector<tunesmith::Candidate> out;
    for (std::size_t i = 0; i < lp.size(); ++i) out.push_back({vocabulary()[i], lp[i]});
    std::sort(out.begin(), out.end(), tunesmith::candidate_before);
    if (out.size() > top_k) out.resize(top_k);
    return out;
  }

  double sequence_logprob(std::span<const std::string> words) const override {
    double total = 0;
    std::string prev = "<s>";
    for (const auto& w : words) {
      if (w == tunesmith::kBoundary) {
        prev = "<s>";
        continue;
      }
      const auto lp = distribution(prev);
      auto it = std::find(vocabulary().begin(), vocabulary().end(), w);
      total += it == vocabulary().end() ? std::log(1e-6) : lp[static_cast<std::size_t>(it - vocabulary().begin())];
      prev = w;
    }
    return total;
  }

 private:
  static std::string previous(const std::vector<std::string>& h) {
    if (h.empty() || h.back() == tunesmith::kBoundary) return "<s>";
    return h.back();
  }
};

}  // namespace stub
