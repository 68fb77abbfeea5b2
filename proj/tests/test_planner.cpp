#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "support.hpp"

using namespace tunesmith;

namespace {

CooccurrenceTable toy_table() {
  CooccurrenceTable t;
  t.add_line("town lights shine over the town square");
  t.add_line("kisses under lights");
  t.add_line("heart of the town beats");
  t.add_line("lights and kisses and music");
  return t;
}

// Brute-force salient scores recomputed token by token.
std::vector<std::pair<double, std::string>> brute_scores(const std::string& text) {
  std::vector<std::string> tokens;
  for (auto line : split_lines(text)) {
    for (auto& t : tokenize(line)) tokens.push_back(t.folded);
  }
  std::set<std::string> seen;
  std::vector<std::pair<double, std::string>> out;
  for (const auto& w : tokens) {
    if (seen.count(w) || !is_content_word(w, builtin_stopwords())) continue;
    seen.insert(w);
    double tf = 0;
    std::size_t first = tokens.size();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] != w) continue;
      tf += 1;
      first = std::min(first, i);
    }
    out.emplace_back(tf * (2.0 - static_cast<double>(first) / static_cast<double>(tokens.size())), w);
  }
  return out;
}

}  // namespace

TEST_CASE("dominant content nouns are extracted") {
  const std::string verse =
      "In a little Spanish town the kisses were sweet\n"
      "My heart in that town, my kisses for you\n"
      "Town of my heart, the kisses, the heart\n";
  auto s = extract_salient(verse, 3);
  CHECK(std::set<std::string>(s.begin(), s.end()) == std::set<std::string>{"town", "kisses", "heart"});
}

TEST_CASE("stopword-only lyrics give nothing") {
  CHECK(extract_salient("and the of to a in is it you that", 3).empty());
  CHECK_THROWS_AS(extract_salient("moon", 0), Error);
}

TEST_CASE("top word matches brute force, ties lexicographic") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> pool{"moon", "river", "heart", "town", "the", "and", "kisses", "night", "day", "of"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (std::size_t k = 1 + rng() % 20; k > 0; --k) text += pool[rng() % pool.size()] + (rng() % 5 ? " " : "\n");
    auto brute = brute_scores(text);
    auto got = extract_salient(text, 1);
    if (brute.empty()) {
      CHECK(got.empty());
      continue;
    }
    std::sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    REQUIRE(got.size() == 1);
    CHECK(got[0] == brute[0].second);
  }
  // Equal scores: alphabetical order decides.
  // zulu: 3 x (2 - 0/8) = 6; alpha: 4 x (2 - 4/8) = 6.
  CHECK(extract_salient("zulu zulu zulu the alpha alpha alpha alpha", 2) ==
        std::vector<std::string>{"alpha", "zulu"});
}

TEST_CASE("extraction never returns stopwords or short words") {
  for (const auto& song : support::corpus()) {
    for (const auto& w : extract_salient(join(song.lines, "\n"), 5)) {
      CHECK_FALSE(builtin_stopwords().contains(w));
      CHECK(w.size() >= 3);
    }
  }
}

TEST_CASE("three salient words over four lines") {
  GenerationRequest req;
  req.salient_words = {"town", "kisses", "heart"};
  req.num_lines = 4;
  auto plan = make_plan(req, toy_table());
  REQUIRE(plan.lines.size() == 4);
  CHECK(plan.lines[0] == std::vector<std::string>{"town"});
  CHECK(plan.lines[1] == std::vector<std::string>{"kisses"});
  CHECK(plan.lines[2] == std::vector<std::string>{"heart"});
  // "lights" shares the most windows with the placed keywords.
  CHECK(plan.lines[3] == std::vector<std::string>{"lights"});
}

TEST_CASE("request validation") {
  GenerationRequest req;
  req.salient_words = {"town"};
  req.num_lines = 0;
  CHECK_THROWS_AS(req.validate(), Error);
  req.num_lines = 1;
  req.salient_words = {"town", "Town"};
  CHECK_THROWS_AS(req.validate(), Error);
  req.salient_words = {};
  CHECK_THROWS_AS(req.validate(), Error);
}

TEST_CASE("two keywords per line, two lines, three salient words") {
  GenerationRequest req;
  req.salient_words = {"town", "kisses", "heart"};
  req.num_lines = 2;
  req.keywords_per_line = 2;
  auto plan = make_plan(req, toy_table());
  std::multiset<std::string> all;
  for (const auto& l : plan.lines) {
    CHECK(l.size() == 2);
    all.insert(l.begin(), l.end());
  }
  CHECK(all.size() == 4);
  for (const auto& s : req.salient_words) CHECK(all.count(s) == 1);
}

TEST_CASE("too small a vocabulary lists the unfilled slots") {
  GenerationRequest req;
  req.salient_words = {"town"};
  req.num_lines = 3;
  CooccurrenceTable tiny;
  tiny.add_line("town hall");
  try {
    make_plan(req, tiny);
    FAIL("expected a plan error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::plan);
    CHECK(std::string(e.what()).find("line 3 slot 1") != std::string::npos);
  }
}

TEST_CASE("random plans have the right shape") {
  const auto& table = support::cooccurrence();
  const auto& lex = support::cmudict();
  std::mt19937_64 rng(14);
  std::vector<std::string> words;
  for (const auto& [w, m] : table.words()) {
    if (m > 20) words.push_back(w);
  }
  REQUIRE(words.size() > 50);
  for (int trial = 0; trial < 100; ++trial) {
    GenerationRequest req;
    req.num_lines = 1 + rng() % 6;
    req.keywords_per_line = 1 + rng() % 3;
    std::set<std::string> chosen;
    const std::size_t n = 1 + rng() % (req.num_lines * req.keywords_per_line);
    while (chosen.size() < n) chosen.insert(words[rng() % words.size()]);
    req.salient_words.assign(chosen.begin(), chosen.end());
    std::shuffle(req.salient_words.begin(), req.salient_words.end(), rng);
    auto plan = make_plan(req, table, &lex);
    REQUIRE(plan.lines.size() == req.num_lines);
    std::multiset<std::string> all;
    for (const auto& l : plan.lines) {
      CHECK(l.size() == req.keywords_per_line);
      all.insert(l.begin(), l.end());
    }
    CHECK(std::set<std::string>(all.begin(), all.end()).size() == all.size());
    for (const auto& s : req.salient_words) CHECK(all.count(s) == 1);
  }
}

TEST_CASE("plan rendering") {
  Plan one{{{"moon"}}};
  std::vector<std::size_t> eight{8};
  CHECK(render_plan(one, eight) == "Line 1: 8 syllables; Keywords: moon");
  Plan empty{{{}}};
  CHECK(render_plan(empty, eight) == "Line 1: 8 syllables; Keywords:");
  Plan two{{{"moon", "river"}, {"mile"}}};
  std::vector<std::size_t> b{8, 6};
  CHECK(render_plan(two, b) ==
        "Line 1: 8 syllables; Keywords: moon, river; Line 2: 6 syllables; Keywords: mile");
  CHECK_THROWS_AS(render_plan(two, eight), Error);
}

TEST_CASE("rendering distinguishes distinct plans") {
  std::mt19937_64 rng(15);
  const std::vector<std::string> kw{"moon", "river", "mile", "town", "heart"};
  std::map<std::string, std::pair<Plan, std::vector<std::size_t>>> seen;
  for (int trial = 0; trial < 2000; ++trial) {
    Plan p;
    std::vector<std::size_t> budgets;
    for (std::size_t l = 1 + rng() % 3; l > 0; --l) {
      std::vector<std::string> line;
      for (std::size_t k = rng() % 3; k > 0; --k) line.push_back(kw[rng() % kw.size()]);
      p.lines.push_back(line);
      budgets.push_back(1 + rng() % 12);
    }
    auto text = render_plan(p, budgets);
    auto [it, fresh] = seen.try_emplace(text, p, budgets);
    if (!fresh) {
      CHECK(it->second.first == p);
      CHECK(it->second.second == budgets);
    }
  }
}

TEST_CASE("plan and co-occurrence files round-trip") {
  Plan p{{{"moon", "river"}, {"mile"}}};
  CHECK(parse_plan(plan_to_json(p)) == p);
  auto t = toy_table();
  auto again = CooccurrenceTable::parse(t.serialize());
  CHECK(again.serialize() == t.serialize());
  CHECK(again.count("kisses", "lights") == 2.0);
  CHECK(again.count("lights", "kisses") == 2.0);
}

TEST_CASE("co-occurrence window is four content words") {
  CooccurrenceTable t;
  t.add_line("alpha bravo charlie delta echo foxtrot");
  CHECK(t.count("alpha", "echo") == 1.0);
  CHECK(t.count("alpha", "foxtrot") == 0.0);
}

TEST_CASE("genre filters the co-occurrence corpus") {
  auto songs = parse_corpus("# title: A\n# genre: pop\nmoon river\n\n# title: B\n# genre: rock\nmoon stone\n");
  auto pop = CooccurrenceTable::build(songs, "Pop");
  CHECK(pop.count("moon", "river") == 1.0);
  CHECK(pop.count("moon", "stone") == 0.0);
}

TEST_CASE("shipped word lists match the built-in copies") {
  CHECK(read_file(support::data_dir() / "stopwords.txt") == std::string(kBuiltinStopwords));
  CHECK(read_file(support::data_dir() / "dangling.txt") == std::string(kBuiltinDangling));
}
