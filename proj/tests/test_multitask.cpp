#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace tunesmith;

namespace {

const std::string kMoon = "Moon river wider than a mile";

std::vector<Song> synthetic_songs(std::size_t n) {
  std::vector<Song> songs;
  const std::vector<std::string> lines{kMoon, "Night and day my dreams come true", "Last Christmas I gave you my gift"};
  for (std::size_t i = 0; i < n; ++i) {
    Song s;
    s.title = "song " + std::to_string(i);
    s.lines = {lines[i % 3], lines[(i + 1) % 3]};
    songs.push_back(s);
  }
  return songs;
}

}  // namespace

TEST_CASE("T1 pairs the rendered plan with the lines") {
  const auto& lex = support::cmudict();
  Plan plan{{{"moon", "river"}}};
  auto s = emit_t1(lex, {kMoon}, plan);
  CHECK(s.input == "Line 1: 8 syllables; Keywords: moon, river");
  CHECK(s.output == "Line 1: Moon river wider than a mile");
  auto two = emit_t1(lex, {kMoon, "Night and day"}, Plan{{{"moon"}, {"night"}}});
  CHECK(two.input == "Line 1: 8 syllables; Keywords: moon; Line 2: 3 syllables; Keywords: night");
  CHECK(two.output == "Line 1: Moon river wider than a mile; Line 2: Night and day");
  CHECK_THROWS_AS(emit_t1(lex, {}, Plan{}), Error);
}

TEST_CASE("T2 outputs the syllable count") {
  const auto& lex = support::cmudict();
  CHECK(emit_t2(lex, kMoon).output == "8");
  CHECK(emit_t2(lex, kMoon).input == kMoon);
  CHECK(emit_t2(lex, "mile").output == "1");
  try {
    emit_t2(lex, "   ");
    FAIL("expected a skip");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::skipped);
  }
}

TEST_CASE("T3 appends running syllable counts") {
  const auto& lex = support::cmudict();
  CHECK(running_counts(lex, kMoon) == "Moon (1) river (3) wider (5) than (6) a (7) mile (8)");
  CHECK(running_counts(lex, "no") == "no (1)");
  auto s = emit_t3(lex, {kMoon}, Plan{{{"moon"}}});
  CHECK(s.output == "Line 1: Moon (1) river (3) wider (5) than (6) a (7) mile (8)");
}

TEST_CASE("T3 totals agree with T2 and increase strictly") {
  const auto& lex = support::cmudict();
  std::size_t checked = 0;
  for (const auto& song : support::corpus()) {
    for (const auto& line : song.lines) {
      std::vector<std::size_t> counts;
      for (const auto& part : split(running_counts(lex, line), ')')) {
        auto open = part.rfind('(');
        if (open != std::string::npos) counts.push_back(std::stoul(part.substr(open + 1)));
      }
      if (counts.empty()) continue;
      for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] > counts[i - 1]);
      CHECK(std::to_string(counts.back()) == emit_t2(lex, line).output);
      ++checked;
    }
  }
  CHECK(checked > 2000);
}

TEST_CASE("T4 syllabifies without stress digits") {
  const auto& lex = support::cmudict();
  CHECK(emit_t4(lex, {"Moon"}).output == "MUWN");
  CHECK(emit_t4(lex, {"river"}).output == "RIH_VER");
  CHECK(emit_t4(lex, {"wider"}).output == "WAY_DER");
  auto s = emit_t4(lex, {"Moon", "river", "wider"});
  CHECK(s.input == "Moon; river; wider");
  CHECK(s.output == "MUWN; RIH_VER; WAY_DER");
  std::vector<SkipRecord> skipped;
  auto partial = emit_t4(lex, {"moon", "zzxqv"}, &skipped);
  CHECK(partial.output == "MUWN");
  REQUIRE(skipped.size() == 1);
  CHECK(skipped[0].reason.find("zzxqv") != std::string::npos);
  CHECK_THROWS_AS(emit_t4(lex, {"zzxqv"}), Error);
}

TEST_CASE("T4 strings re-split into the syllabify groups") {
  const auto& lex = support::cmudict();
  std::size_t n = 0;
  for (const auto& entry : lex.entries()) {
    const auto& word = entry.first;
    auto prons = lex.lookup(word);
    if (prons.empty() || ++n % 50 != 0) continue;
    const auto& p = prons.front();
    auto text = emit_t4(lex, {word}).output;
    std::string flat;
    for (char c : text) {
      if (c != '_') flat += c;
    }
    std::string symbols;
    for (const auto& ph : p.phonemes()) symbols += ph.symbol;
    CHECK(flat == symbols);
    auto groups = syllabify(p);
    auto pieces = split(text, '_');
    REQUIRE(pieces.size() == groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) CHECK(pieces[k] == syllable_string({groups[k]}));
  }
}

TEST_CASE("task mixes") {
  auto mix = TaskMix::parse("T1=0.5, t2=0.3,T3=0.2");
  CHECK(mix.ratio[3] == 0.0);
  CHECK_THROWS_AS(TaskMix::parse("T1=0.5,T2=0.4"), Error);
  CHECK_THROWS_AS(TaskMix::parse("T5=1"), Error);
  CHECK_THROWS_AS(TaskMix::parse("T1"), Error);
  auto a = mix.allocate(100);
  CHECK(a[0] + a[1] + a[2] + a[3] == 100);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    TaskMix m;
    double w[4];
    double sum = 0;
    for (double& x : w) sum += (x = static_cast<double>(rng() % 100));
    if (sum == 0) continue;
    for (int t = 0; t < 4; ++t) m.ratio[static_cast<std::size_t>(t)] = w[t] / sum;
    const std::size_t n = rng() % 500;
    auto c = m.allocate(n);
    std::size_t total = 0;
    for (int t = 0; t < 4; ++t) {
      const double exact = m.ratio[static_cast<std::size_t>(t)] * static_cast<double>(n);
      CHECK(std::abs(static_cast<double>(c[static_cast<std::size_t>(t)]) - exact) <= 1.0);
      total += c[static_cast<std::size_t>(t)];
    }
    CHECK(total == n);
  }
}

TEST_CASE("a single-task mix gives only that task") {
  auto ds = build_dataset(synthetic_songs(10), support::cmudict(), TaskMix::parse("T1=1.0"), 3);
  CHECK(ds.samples[0].size() == 10);
  CHECK(ds.samples[1].empty());
  CHECK(ds.samples[2].empty());
  CHECK(ds.samples[3].empty());
}

TEST_CASE("three-task mix on 100 songs") {
  auto ds = build_dataset(synthetic_songs(100), support::cmudict(), TaskMix::parse("T1=0.5,T2=0.3,T3=0.2"), 5);
  CHECK(ds.songs_allocated[0] == 50);
  CHECK(ds.songs_allocated[1] == 30);
  CHECK(ds.songs_allocated[2] == 20);
  CHECK(ds.samples[0].size() == 50);
  CHECK(ds.samples[1].size() == 60);  // two lines per song
  CHECK(ds.samples[2].size() == 20);
}

TEST_CASE("datasets are deterministic under a fixed seed") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "tunesmith_dataset_test";
  fs::remove_all(dir);
  const auto& lex = support::cmudict();
  auto mix = TaskMix::parse("T1=0.25,T2=0.25,T3=0.25,T4=0.25");
  write_dataset(build_dataset(support::corpus(), lex, mix, 42), dir / "a");
  write_dataset(build_dataset(support::corpus(), lex, mix, 42), dir / "b");
  write_dataset(build_dataset(support::corpus(), lex, mix, 43), dir / "c");
  for (const char* f : {"t1.tsv", "t2.tsv", "t3.tsv", "t4.tsv", "manifest.json"}) {
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  }
  CHECK(read_file(dir / "a" / "t1.tsv") != read_file(dir / "c" / "t1.tsv"));
  auto manifest = nlohmann::json::parse(read_file(dir / "a" / "manifest.json"));
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["tasks"]["T2"]["songs"].get<int>() > 0);
  const std::string t2 = read_file(dir / "a" / "t2.tsv");
  for (const auto& line : split_lines(t2)) {
    CHECK(std::count(line.begin(), line.end(), '\t') == 1);
  }
  CHECK_THROWS_AS(build_dataset({}, lex, mix, 1), Error);
  fs::remove_all(dir);
}

TEST_CASE("shuffle is a permutation and reproducible") {
  std::vector<std::size_t> a(50);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
  auto b = a;
  detail::shuffle_indices(a, 9);
  detail::shuffle_indices(b, 9);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("syllable planning success rate") {
  const auto& lex = support::cmudict();
  CHECK(success_rate(lex, {kMoon, "mile"}, {8, 1}) == 1.0);
  CHECK(success_rate(lex, {"Cause the Christmas gift was for"}, {7}) == 1.0);
  CHECK(success_rate(lex, {"Cause the Christmas gift was for"}, {8}) == 0.0);
  CHECK_THROWS_AS(success_rate(lex, {}, {}), Error);
  CHECK_THROWS_AS(success_rate(lex, {kMoon}, {8, 1}), Error);
  std::vector<std::string> out{kMoon, "mile mile", "a"};
  std::vector<std::size_t> target{8, 3, 1};
  const double before = success_rate(lex, out, target);
  out[1] = "mile mile mile";
  CHECK(success_rate(lex, out, target) >= before);
  CHECK(success_rate(lex, out, target) == 1.0);
}
