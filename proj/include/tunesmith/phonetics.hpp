/**
 * @file phonetics.hpp
 * @brief Pronouncing-dictionary lexicon, syllable counting, stress patterns
 *        and maximal-onset syllabification.
 *
 * The lexicon reads the CMU pronouncing dictionary format in both its classic
 * layout ("WORD  P H O1 N", ";;;" comments) and the lowercase single-space
 * layout with trailing "#" comments. Dictionary stress digits 1 and 2 map to
 * stressed, 0 to unstressed.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tunesmith/error.hpp"
#include "tunesmith/text.hpp"

namespace tunesmith {

enum class Stress : std::uint8_t { unstressed = 0, stressed = 1, unknown = 2 };

using StressPattern = std::vector<Stress>;

inline char stress_char(Stress s) {
  switch (s) {
    case Stress::unstressed: return '0';
    case Stress::stressed: return '1';
    case Stress::unknown: return '?';
  }
  return '?';
}

inline std::string to_string(const StressPattern& p) {
  std::string out;
  for (Stress s : p) out += stress_char(s);
  return out;
}

/// Parses "1010" into a binary pattern.
inline StressPattern parse_stress_pattern(std::string_view bits) {
  StressPattern out;
  for (char c : bits) {
    if (c == '1') out.push_back(Stress::stressed);
    else if (c == '0') out.push_back(Stress::unstressed);
    else throw Error(Errc::parse, "stress pattern must be 0/1, got '" + std::string(bits) + "'");
  }
  return out;
}

namespace arpabet {

inline constexpr std::array<std::string_view, 15> kVowels = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW"};

inline constexpr std::array<std::string_view, 24> kConsonants = {
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
    "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};

inline bool is_vowel(std::string_view symbol) {
  return std::find(kVowels.begin(), kVowels.end(), symbol) != kVowels.end();
}

inline bool is_consonant(std::string_view symbol) {
  return std::find(kConsonants.begin(), kConsonants.end(), symbol) != kConsonants.end();
}

}  // namespace arpabet

/// One ARPAbet symbol. Vowels carry a dictionary stress digit, consonants none.
struct Phoneme {
  std::string symbol;
  std::optional<int> stress;

  bool is_vowel() const { return stress.has_value(); }

  /// Parses "AE1" or "S". Returns nullopt for anything outside the 39-symbol set.
  static std::optional<Phoneme> parse(std::string_view token) {
    std::string tok = to_upper(token);
    if (tok.empty()) return std::nullopt;
    char last = tok.back();
    if (last >= '0' && last <= '2') {
      std::string base = tok.substr(0, tok.size() - 1);
      if (!arpabet::is_vowel(base)) return std::nullopt;
      return Phoneme{base, last - '0'};
    }
    if (arpabet::is_consonant(tok)) return Phoneme{tok, std::nullopt};
    return std::nullopt;
  }

  std::string to_string() const {
    return stress ? symbol + std::to_string(*stress) : symbol;
  }

  friend bool operator==(const Phoneme&, const Phoneme&) = default;
};

class Pronunciation {
 public:
  Pronunciation() = default;

  explicit Pronunciation(std::vector<Phoneme> phonemes) : phonemes_(std::move(phonemes)) {
    for (const auto& p : phonemes_) {
      if (p.is_vowel()) {
        stress_.push_back(*p.stress == 0 ? Stress::unstressed : Stress::stressed);
      }
    }
  }

  /// "S P AE1 N IH0 SH". Throws Errc::parse on unknown symbols or an empty list.
  static Pronunciation parse(std::string_view phones) {
    std::vector<Phoneme> ph;
    for (std::string_view tok : split_whitespace(phones)) {
      auto p = Phoneme::parse(tok);
      if (!p) throw Error(Errc::parse, "unknown phoneme '" + std::string(tok) + "'");
      ph.push_back(std::move(*p));
    }
    if (ph.empty()) throw Error(Errc::parse, "pronunciation has no phonemes");
    return Pronunciation(std::move(ph));
  }

  const std::vector<Phoneme>& phonemes() const { return phonemes_; }
  const StressPattern& stress_pattern() const { return stress_; }
  std::size_t syllable_count() const { return stress_.size(); }

  std::string to_string() const {
    std::string out;
    for (const auto& p : phonemes_) {
      if (!out.empty()) out += ' ';
      out += p.to_string();
    }
    return out;
  }

  friend bool operator==(const Pronunciation& a, const Pronunciation& b) {
    return a.phonemes_ == b.phonemes_;
  }

 private:
  std::vector<Phoneme> phonemes_;
  StressPattern stress_;
};

/// Word to pronunciations, case-insensitive. Immutable once parsed.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::string_view text) {
    Lexicon lex;
    for (std::string_view raw : split_lines(text)) {
      std::string_view line = trim(raw);
      if (line.empty() || line.starts_with(";;;")) continue;
      if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = trim(line.substr(0, hash));
        if (line.empty()) continue;
      }
      auto fields = split_whitespace(line);
      if (fields.size() < 2) {
        ++lex.malformed_;
        continue;
      }
      std::string_view word = fields[0];
      // Variant suffix "WORD(2)".
      if (word.size() > 3 && word.back() == ')') {
        if (auto open = word.rfind('('); open != std::string_view::npos && open > 0) {
          std::string_view digits = word.substr(open + 1, word.size() - open - 2);
          if (!digits.empty() && std::all_of(digits.begin(), digits.end(),
                                             [](char c) { return c >= '0' && c <= '9'; })) {
            word = word.substr(0, open);
          }
        }
      }
      std::vector<Phoneme> ph;
      bool ok = true;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        auto p = Phoneme::parse(fields[i]);
        if (!p) {
          ok = false;
          break;
        }
        ph.push_back(std::move(*p));
      }
      if (!ok || ph.empty()) {
        ++lex.malformed_;
        continue;
      }
      lex.add(word, Pronunciation(std::move(ph)));
    }
    if (lex.entries_.empty()) throw Error(Errc::empty_lexicon, "no dictionary entries found");
    return lex;
  }

  static Lexicon load(const std::filesystem::path& path) { return parse(read_file(path)); }

  void add(std::string_view word, Pronunciation pron) {
    entries_[to_lower(word)].push_back(std::move(pron));
  }

  /// All pronunciations in dictionary order; empty when out of vocabulary.
  std::span<const Pronunciation> lookup(std::string_view word) const {
    std::string key = fold(word);
    if (key.empty()) return {};
    auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    return it->second;
  }

  bool contains(std::string_view word) const { return !lookup(word).empty(); }

  std::size_t size() const { return entries_.size(); }
  std::size_t malformed_lines() const { return malformed_; }

  const std::unordered_map<std::string, std::vector<Pronunciation>>& entries() const {
    return entries_;
  }

 private:
  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
  std::size_t malformed_ = 0;
};

enum class Provenance { dictionary, estimated };

struct SyllableCount {
  std::size_t count = 0;
  Provenance provenance = Provenance::dictionary;
};

/// Orthographic estimate for out-of-vocabulary words: vowel-letter clusters,
/// minus a silent final "e" (but not "-le" after a consonant), at least one.
inline std::size_t estimate_syllables(std::string_view word) {
  std::string w;
  for (char c : to_lower(word)) {
    if (is_ascii_alpha(c)) w += c;
  }
  auto vowel_at = [&](std::size_t i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
    return c == 'y' && i > 0;
  };
  std::size_t clusters = 0;
  bool in_cluster = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    bool v = vowel_at(i);
    if (v && !in_cluster) ++clusters;
    in_cluster = v;
  }
  const std::size_t n = w.size();
  if (n >= 2 && w[n - 1] == 'e' && !vowel_at(n - 2)) {
    bool consonant_le = n >= 3 && w[n - 2] == 'l' && !vowel_at(n - 3);
    if (!consonant_le && clusters > 0) --clusters;
  }
  return std::max<std::size_t>(clusters, 1);
}

namespace detail {

// Counts one hyphen-free, stripped token.
inline std::optional<SyllableCount> count_part(const Lexicon& lex, std::string_view part) {
  if (!has_alpha(part)) return std::nullopt;
  auto prons = lex.lookup(part);
  if (!prons.empty()) return SyllableCount{prons.front().syllable_count(), Provenance::dictionary};
  return SyllableCount{estimate_syllables(part), Provenance::estimated};
}

}  // namespace detail

/// Non-throwing variant: nullopt for tokens without letters.
inline std::optional<SyllableCount> try_count_syllables(const Lexicon& lex, std::string_view word) {
  auto tokens = tokenize(word);
  if (tokens.empty()) return std::nullopt;
  SyllableCount total{0, Provenance::dictionary};
  for (const auto& t : tokens) {
    auto c = detail::count_part(lex, t.surface);
    if (!c) return std::nullopt;
    total.count += c->count;
    if (c->provenance == Provenance::estimated) total.provenance = Provenance::estimated;
  }
  return total;
}

/// Dictionary count from the first-listed pronunciation, estimated otherwise.
inline SyllableCount count_syllables_word(const Lexicon& lex, std::string_view word) {
  auto c = try_count_syllables(lex, word);
  if (!c) throw Error(Errc::non_lexical_token, "'" + std::string(word) + "'");
  return *c;
}

namespace detail {

template <typename Fn>
void for_each_line_token(std::string_view line, Fn&& fn) {
  for (const auto& t : tokenize(line)) {
    if (!has_alpha(t.surface)) throw Error(Errc::non_lexical_token, "'" + t.surface + "'");
    fn(t);
  }
}

}  // namespace detail

inline std::size_t count_syllables_line(const Lexicon& lex, std::string_view line) {
  std::size_t total = 0;
  detail::for_each_line_token(line, [&](const Token& t) {
    total += detail::count_part(lex, t.surface)->count;
  });
  return total;
}

struct WordSpan {
  std::string word;
  std::size_t begin = 0;
  std::size_t length = 0;
  bool known = true;
};

struct LineStress {
  StressPattern marks;
  std::vector<WordSpan> spans;
};

/// Concatenated stress of a line. Out-of-vocabulary words fill their estimated
/// span with Stress::unknown.
inline LineStress stress_pattern_line(const Lexicon& lex, std::string_view line) {
  LineStress out;
  detail::for_each_line_token(line, [&](const Token& t) {
    auto prons = lex.lookup(t.surface);
    WordSpan span{t.folded, out.marks.size(), 0, !prons.empty()};
    if (prons.empty()) {
      span.length = estimate_syllables(t.surface);
      out.marks.insert(out.marks.end(), span.length, Stress::unknown);
    } else {
      const auto& p = prons.front().stress_pattern();
      span.length = p.size();
      out.marks.insert(out.marks.end(), p.begin(), p.end());
    }
    out.spans.push_back(std::move(span));
  });
  return out;
}

/// Legal English syllable onsets, one per line, phonemes space separated.
inline constexpr std::string_view kBuiltinOnsets = R"(# Legal English syllable onsets for maximal-onset syllabification.
# One onset per line, ARPAbet consonants separated by spaces.
B
CH
D
DH
F
G
HH
JH
K
L
M
N
P
R
S
SH
T
TH
V
W
Y
Z
ZH
B L
B R
B Y
D R
D W
F L
F R
F Y
G L
G R
G W
HH Y
K L
K R
K W
K Y
M Y
P L
P R
P Y
S F
S K
S L
S M
S N
S P
S T
S W
SH R
T R
T W
TH R
TH W
V Y
S K L
S K R
S K W
S K Y
S P L
S P R
S P Y
S T R
)";

class OnsetTable {
 public:
  static OnsetTable parse(std::string_view text) {
    OnsetTable t;
    for (std::string_view raw : split_lines(text)) {
      std::string_view line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      std::vector<std::string> cluster;
      for (auto sym : split_whitespace(line)) {
        std::string s = to_upper(sym);
        if (!arpabet::is_consonant(s)) {
          throw Error(Errc::parse, "onset table: '" + s + "' is not a consonant");
        }
        cluster.push_back(std::move(s));
      }
      t.onsets_.insert(std::move(cluster));
    }
    return t;
  }

  static const OnsetTable& builtin() {
    static const OnsetTable table = parse(kBuiltinOnsets);
    return table;
  }

  bool legal(std::span<const Phoneme> cluster) const {
    if (cluster.empty()) return true;
    std::vector<std::string> key;
    for (const auto& p : cluster) key.push_back(p.symbol);
    return onsets_.count(key) > 0;
  }

  std::size_t size() const { return onsets_.size(); }

 private:
  std::set<std::vector<std::string>> onsets_;
};

using Syllable = std::vector<Phoneme>;

/// Splits a pronunciation into one phoneme group per vowel. Each intervocalic
/// consonant run gives its longest legal suffix to the following syllable.
inline std::vector<Syllable> syllabify(const Pronunciation& pron,
                                       const OnsetTable& onsets = OnsetTable::builtin()) {
  const auto& ph = pron.phonemes();
  std::vector<std::size_t> vowels;
  for (std::size_t i = 0; i < ph.size(); ++i) {
    if (ph[i].is_vowel()) vowels.push_back(i);
  }
  if (vowels.empty()) return {Syllable(ph.begin(), ph.end())};

  // Start index of each syllable.
  std::vector<std::size_t> starts{0};
  for (std::size_t k = 1; k < vowels.size(); ++k) {
    std::size_t lo = vowels[k - 1] + 1;
    std::size_t hi = vowels[k];
    std::size_t start = hi;
    for (std::size_t s = lo; s <= hi; ++s) {
      if (onsets.legal(std::span<const Phoneme>(ph.data() + s, hi - s))) {
        start = s;
        break;
      }
    }
    starts.push_back(start);
  }
  std::vector<Syllable> out;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    std::size_t end = k + 1 < starts.size() ? starts[k + 1] : ph.size();
    out.emplace_back(ph.begin() + static_cast<std::ptrdiff_t>(starts[k]),
                     ph.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

/// "RIH_VER": symbols without stress digits, syllables joined by '_'.
inline std::string syllable_string(const std::vector<Syllable>& syllables) {
  std::string out;
  for (std::size_t k = 0; k < syllables.size(); ++k) {
    if (k) out += '_';
    for (const auto& p : syllables[k]) out += p.symbol;
  }
  return out;
}

}  // namespace tunesmith
