#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace tunesmith;

namespace {

Phrase pitched(std::initializer_list<double> durs) {
  Phrase p;
  for (double d : durs) p.notes.push_back({d, 60, std::nullopt});
  return p;
}

std::string bits(const StressPattern& p) { return to_string(p); }

Errc code_of(const std::string& text) {
  try {
    parse_melody(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io;
}

std::string message_of(const std::string& text) {
  try {
    parse_melody(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("thirteen quarter notes make thirteen slots") {
  std::string notes;
  for (int i = 0; i < 13; ++i) notes += std::string(i ? "," : "") + R"({"dur":1,"pitch":)" + std::to_string(60 + i) + "}";
  auto m = parse_melody(R"({"title":"t","phrases":[{"notes":[)" + notes + "]}]}");
  REQUIRE(m.phrases.size() == 1);
  CHECK(m.phrases[0].notes.size() == 13);
  CHECK(syllable_slots(m.phrases[0]).size() == 13);
  CHECK(m.title == "t");
}

TEST_CASE("rests are kept and flagged") {
  auto m = parse_melody(R"({"phrases":[{"notes":[{"dur":1,"pitch":60},{"dur":0.5,"pitch":null}]}]})");
  REQUIRE(m.phrases[0].notes.size() == 2);
  CHECK(m.phrases[0].notes[1].is_rest());
  CHECK(syllable_slots(m.phrases[0]).size() == 1);
}

TEST_CASE("schema violations name the phrase and note") {
  const std::string zero = R"({"phrases":[{"notes":[{"dur":1,"pitch":60}]},{"notes":[{"dur":1,"pitch":60},{"dur":0,"pitch":62}]}]})";
  CHECK(code_of(zero) == Errc::parse);
  CHECK(message_of(zero).find("phrase 1, note 1") != std::string::npos);
  CHECK(code_of(R"({"phrases":[]})") == Errc::parse);
  CHECK(code_of(R"({"phrases":[{"notes":[]}]})") == Errc::parse);
  CHECK(code_of(R"({"phrases":[{"notes":[{"dur":-1,"pitch":60}]}]})") == Errc::parse);
  CHECK(code_of(R"({"phrases":[{"notes":[{"dur":1,"pitch":null,"slur":1}]}]})") == Errc::parse);
  CHECK(code_of(R"({"phrases":[{"notes":[{"dur":1,"pitch":60,"slur":0}]}]})") == Errc::parse);
  CHECK(code_of(R"({"phrases":[{"notes":[{"dur":1,"pitch":60,"slur":1},{"dur":1,"pitch":61},{"dur":1,"pitch":62,"slur":1}]}]})") ==
        Errc::parse);
  CHECK(code_of(R"({"phrases":[{"notes":[{"dur":1}]}]})") == Errc::parse);
  CHECK(code_of("not json") == Errc::parse);
}

TEST_CASE("a slur group collapses into one slot") {
  Phrase p;
  p.notes = {{1.0, 60, 1}, {1.0, 62, 1}};
  auto slots = syllable_slots(p);
  REQUIRE(slots.size() == 1);
  CHECK(slots[0].duration == 2.0);
  Phrase rests;
  rests.notes = {{1.0, std::nullopt, std::nullopt}, {2.0, std::nullopt, std::nullopt}};
  CHECK(syllable_slots(rests).empty());
}

TEST_CASE("rhythm marks compare each slot with the phrase mean") {
  Melody m;
  m.phrases = {pitched({2, 1, 2, 1})};
  auto cs = compile_constraints(m);
  CHECK(cs.budgets == std::vector<std::size_t>{4});
  CHECK(bits(cs.rhythm[0]) == "1010");

  m.phrases = {pitched({0.7, 0.7, 0.7})};
  CHECK(bits(compile_constraints(m).rhythm[0]) == "111");

  Melody two;
  Phrase a;
  Phrase b;
  for (int i = 0; i < 13; ++i) a.notes.push_back({1.0, 60, std::nullopt});
  for (int i = 0; i < 10; ++i) b.notes.push_back({1.0, 60, std::nullopt});
  two.phrases = {a, b};
  CHECK(compile_constraints(two).budgets == std::vector<std::size_t>{13, 10});
}

TEST_CASE("all-rest phrase gives budget zero") {
  Melody m;
  Phrase rest;
  rest.notes = {{1.0, std::nullopt, std::nullopt}};
  m.phrases = {pitched({1, 2}), rest};
  auto cs = compile_constraints(m);
  CHECK(cs.budgets == std::vector<std::size_t>{2, 0});
  CHECK(cs.rhythm[1].empty());
}

TEST_CASE("per-song mean differs from per-phrase mean") {
  Melody m;
  m.phrases = {pitched({1, 1}), pitched({3, 3})};
  CHECK(bits(compile_constraints(m, MeanScope::per_phrase).rhythm[0]) == "11");
  auto song = compile_constraints(m, MeanScope::per_song);
  CHECK(bits(song.rhythm[0]) == "00");
  CHECK(bits(song.rhythm[1]) == "11");
}

TEST_CASE("compiled constraints match an integer oracle on random melodies") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto m = support::random_melody(rng, 1, 5, 1, 12);
    auto cs = compile_constraints(m);
    std::size_t total = 0;
    for (std::size_t p = 0; p < m.phrases.size(); ++p) {
      // Half-beat units make every duration an integer.
      std::vector<long> units;
      std::optional<int> group;
      for (const auto& n : m.phrases[p].notes) {
        if (n.is_rest()) {
          group.reset();
          continue;
        }
        long u = std::lround(n.duration * 2);
        if (n.slur && group == n.slur) units.back() += u;
        else units.push_back(u);
        group = n.slur;
      }
      long sum = 0;
      for (long u : units) sum += u;
      REQUIRE(cs.budgets[p] == units.size());
      REQUIRE(cs.rhythm[p].size() == units.size());
      for (std::size_t k = 0; k < units.size(); ++k) {
        const bool stressed = units[k] * static_cast<long>(units.size()) >= sum;
        CHECK((cs.rhythm[p][k] == Stress::stressed) == stressed);
      }
      total += units.size();
    }
    CHECK(cs.total_slots() == total);
  }
}

TEST_CASE("scaling a phrase leaves the constraints unchanged") {
  std::mt19937_64 rng(5);
  const double factors[] = {0.1, 1.0 / 3.0, 1.7, 3.0, 1000.0, 1e-4};
  for (int trial = 0; trial < 200; ++trial) {
    auto m = support::random_melody(rng, 1, 4, 1, 12);
    auto scaled = m;
    for (auto& p : scaled.phrases) {
      const double f = factors[rng() % 6];
      for (auto& n : p.notes) n.duration *= f;
    }
    CHECK(compile_constraints(scaled) == compile_constraints(m));
  }
}

TEST_CASE("reordering notes inside a slur group keeps the slot") {
  Phrase p;
  p.notes = {{1.0, 60, std::nullopt}, {0.5, 62, 1}, {1.5, 64, 1}, {0.5, 65, std::nullopt}};
  Phrase q = p;
  std::swap(q.notes[1], q.notes[2]);
  Melody a{{p}, std::nullopt};
  Melody b{{q}, std::nullopt};
  CHECK(compile_constraints(a) == compile_constraints(b));
  CHECK(syllable_slots(p)[1].duration == syllable_slots(q)[1].duration);
}

TEST_CASE("melody and constraint files round-trip") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = support::random_melody(rng, 1, 4, 1, 8);
    m.title = "song " + std::to_string(trial);
    auto again = parse_melody(to_json(m));
    CHECK(to_json(again) == to_json(m));
    auto cs = compile_constraints(m);
    CHECK(parse_constraints(to_json(cs)) == cs);
  }
  CHECK_THROWS_AS(parse_constraints(R"({"budgets":[2],"rhythm":["1"]})"), Error);
}
