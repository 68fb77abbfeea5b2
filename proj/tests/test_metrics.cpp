#include <catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace tunesmith;

TEST_CASE("distinct-n counts within lines") {
  CHECK(*distinct_n({"a b a b"}, 1) == 0.5);
  CHECK(std::abs(*distinct_n({"a b a b"}, 2) - 2.0 / 3.0) < 1e-12);
  CHECK(*distinct_n({"a b", "b a"}, 2) == 1.0);
  CHECK(*distinct_n({"A, b", "a b!"}, 1) == 0.5);
  CHECK_FALSE(distinct_n({"a", "b"}, 2).has_value());
  CHECK_FALSE(distinct_n({}, 1).has_value());
  CHECK_THROWS_AS(distinct_n({"a"}, 0), Error);
}

TEST_CASE("salient coverage") {
  CHECK(std::abs(salient_coverage({"The Moon is high", "over the river"}, {"moon", "River", "town"}) - 2.0 / 3.0) <
        1e-12);
  CHECK(salient_coverage({"moonlight"}, {"moon"}) == 0.0);
  CHECK_THROWS_AS(salient_coverage({"x"}, {}), Error);
}

TEST_CASE("BLEU") {
  const Lines ref{"the cat sat on a mat"};
  const Lines cand{"the cat sat on the mat"};
  CHECK(std::abs(bleu(cand, ref, BleuMode::corpus) - std::pow(5.0 / 6 * 3.0 / 5 * 2.0 / 4 * 1.0 / 3, 0.25)) < 1e-12);
  CHECK(std::abs(bleu(cand, ref, BleuMode::sentence) - std::pow(6.0 / 7 * 4.0 / 6 * 3.0 / 5 * 2.0 / 4, 0.25)) < 1e-12);
  CHECK(bleu(ref, ref, BleuMode::corpus) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(bleu(ref, ref, BleuMode::sentence) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(bleu({"dog runs fast"}, ref, BleuMode::corpus) == 0.0);
  // brevity: 3 candidate words against 6 reference words
  CHECK(std::abs(bleu({"the cat sat"}, ref, BleuMode::corpus) - std::exp(1.0 - 2.0)) < 1e-12);
  CHECK_THROWS_AS(bleu(cand, {}, BleuMode::corpus), Error);
  CHECK_THROWS_AS(bleu({"a", "b"}, ref, BleuMode::sentence), Error);
}

TEST_CASE("cropped lines") {
  CHECK(is_cropped("I will love you and"));
  CHECK(is_cropped("walking to the"));
  CHECK_FALSE(is_cropped("Moon river wider than a mile"));
  CHECK_FALSE(is_cropped(""));
  CHECK(cropped_ratio({"walking to the", "moon river", "love and", "night"}) == 0.5);
  CHECK(cropped_ratio({"walking to the", "love and"}, WordSet{}) == 0.0);
  CHECK(cropped_ratio({"walking to the"}, WordSet::parse("# custom\nthe\n")) == 1.0);
  CHECK_THROWS_AS(cropped_ratio({}), Error);
}

TEST_CASE("stress-duration alignment") {
  const auto& lex = support::cmudict();
  ConstraintSet good{{2}, {parse_stress_pattern("10")}};
  ConstraintSet bad{{2}, {parse_stress_pattern("01")}};
  CHECK(*stress_duration_pct({"Spanish"}, good, lex) == 1.0);
  CHECK(*stress_duration_pct({"Spanish"}, bad, lex) == 0.0);
  CHECK_FALSE(stress_duration_pct({"moon town"}, good, lex).has_value());
  ConstraintSet mixed{{4}, {parse_stress_pattern("1001")}};
  CHECK(*stress_duration_pct({"Spanish river"}, mixed, lex) == 0.5);
  CHECK_THROWS_AS(stress_duration_pct({"Spanish town"}, good, lex), Error);
  CHECK_THROWS_AS(stress_duration_pct({"Spanish", "moon"}, good, lex), Error);
}

TEST_CASE("a melody built from the lyric's own stress aligns fully") {
  const auto& lex = support::cmudict();
  const Lines lyric{"Spanish river wider", "little morning kisses"};
  Melody m;
  for (const auto& line : lyric) {
    Phrase p;
    for (auto s : stress_pattern_line(lex, line).marks) p.notes.push_back({s == Stress::stressed ? 2.0 : 1.0, 60, std::nullopt});
    m.phrases.push_back(p);
  }
  CHECK(*stress_duration_pct(lyric, compile_constraints(m), lex) == 1.0);
}

TEST_CASE("evaluate fills what its inputs allow") {
  const auto& lex = support::cmudict();
  Lines refs{"Spanish river", "moon"};
  ConstraintSet cs{{4, 1}, {parse_stress_pattern("1010"), parse_stress_pattern("1")}};
  EvalInputs in;
  in.candidate = {"Spanish river", "moon"};
  in.salient = {"river", "town"};
  in.references = &refs;
  in.constraints = &cs;
  in.lexicon = &lex;
  in.lm = &support::trigram();
  auto r = evaluate(in);
  CHECK(r.complete());
  CHECK(*r.salient_coverage == 0.5);
  CHECK(*r.cropped_ratio == 0.0);
  CHECK(*r.perplexity > 1.0);
  CHECK(r.to_json().find("n/a") == std::string::npos);

  EvalInputs bare;
  bare.candidate = {"Spanish river"};
  auto b = evaluate(bare);
  CHECK_FALSE(b.complete());
  CHECK_FALSE(b.salient_coverage.has_value());
  CHECK_FALSE(b.perplexity.has_value());
  CHECK(b.dist1.has_value());
  auto doc = nlohmann::json::parse(b.to_json());
  CHECK(doc["perplexity"] == "n/a");
  CHECK(doc.size() == 8);
  CHECK(b.to_table().find("n/a") != std::string::npos);
}
