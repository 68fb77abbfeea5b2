/**
 * @file tunesmith.cpp
 * @brief Command-line front end.
 */
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include "tunesmith/tunesmith.hpp"

namespace ts = tunesmith;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

struct Common {
  std::uint64_t seed = 0;
  std::string lexicon;
};

void add_seed(CLI::App* cmd, Common& c) { cmd->add_option("--seed", c.seed, "Random seed (recorded in the manifest)"); }

void add_lexicon(CLI::App* cmd, Common& c) {
  cmd->add_option("--lexicon", c.lexicon, "Pronouncing dictionary (default: $TUNESMITH_LEXICON)");
}

std::string lexicon_path(const Common& c) {
  if (!c.lexicon.empty()) return c.lexicon;
  if (const char* env = std::getenv("TUNESMITH_LEXICON"); env && *env) return env;
  throw UsageError("--lexicon is required (or set TUNESMITH_LEXICON)");
}

std::vector<std::string> comma_list(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& item : ts::split(s, ',')) {
    auto t = ts::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

fs::path manifest_path(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

ts::RunManifest start_manifest(const std::string& command, const Common& c) {
  ts::RunManifest m;
  m.command = command;
  m.seed = c.seed;
  m.config["seed"] = std::to_string(c.seed);
  return m;
}

void finish_manifest(ts::RunManifest& m, Clock::time_point t0, const fs::path& where) {
  m.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  m.write(where);
}

ts::ConstraintSet load_constraints(const std::string& melody, const std::string& constraints, ts::MeanScope scope,
                                   ts::RunManifest& m) {
  if (!constraints.empty()) {
    m.add_input(constraints);
    return ts::parse_constraints(ts::read_file(constraints));
  }
  if (melody.empty()) throw UsageError("one of --melody or --constraints is required");
  m.add_input(melody);
  return ts::compile_constraints(ts::parse_melody(ts::read_file(melody)), scope);
}

ts::MeanScope parse_scope(const std::string& s) {
  if (s == "phrase") return ts::MeanScope::per_phrase;
  if (s == "song") return ts::MeanScope::per_song;
  throw UsageError("--mean-scope must be phrase or song");
}

/// Salient words round-robin over lines; used when no co-occurrence table is available.
ts::Plan salient_only_plan(const std::vector<std::string>& salient, std::size_t lines) {
  ts::Plan p;
  p.lines.resize(lines);
  for (std::size_t j = 0; j < salient.size(); ++j) p.lines[j % lines].push_back(ts::fold(salient[j]));
  return p;
}

struct PlanOptions {
  std::string title;
  std::string genre;
  std::string salient;
  std::size_t keywords_per_line = 1;
};

void add_plan_options(CLI::App* cmd, PlanOptions& o) {
  cmd->add_option("--title", o.title, "Song title");
  cmd->add_option("--genre", o.genre, "Genre");
  cmd->add_option("--salient", o.salient, "Comma-separated salient words")->required();
  cmd->add_option("--keywords-per-line", o.keywords_per_line, "Keywords per lyric line")->check(CLI::PositiveNumber);
}

ts::Plan build_plan(const PlanOptions& o, const ts::ConstraintSet& cs, const ts::CooccurrenceTable* cooc,
                    const ts::Lexicon& lex, ts::GenerationRequest& req) {
  req.title = o.title;
  req.genre = o.genre;
  req.salient_words = comma_list(o.salient);
  req.num_lines = ts::singable_phrases(cs);
  req.keywords_per_line = o.keywords_per_line;
  if (req.num_lines == 0) throw ts::Error(ts::Errc::plan, "melody has no singable phrase");
  if (!cooc || cooc->empty()) {
    req.validate();
    return salient_only_plan(req.salient_words, req.num_lines);
  }
  return ts::make_plan(req, *cooc, &lex);
}

struct DecodeOptions {
  double alpha = 0.01;
  std::size_t beam_width = 8;
  std::size_t num_groups = 4;
  double diversity = 0.5;
  std::size_t top_k = 50;
  double keyword_boost = std::log(4.0);
  std::string oov_policy = "reject";
};

void add_decode_options(CLI::App* cmd, DecodeOptions& o) {
  cmd->add_option("--beam-width", o.beam_width, "Total beams");
  cmd->add_option("--num-groups", o.num_groups, "Diverse beam groups");
  cmd->add_option("--diversity", o.diversity, "Group diversity strength");
  cmd->add_option("--top-k", o.top_k, "Candidates per expansion");
  cmd->add_option("--keyword-boost", o.keyword_boost, "Log-score bonus for plan keywords");
  cmd->add_option("--oov-policy", o.oov_policy, "reject or penalize")->check(CLI::IsMember({"reject", "penalize"}));
}

ts::DecoderConfig decoder_config(const DecodeOptions& o, double alpha, std::uint64_t seed) {
  ts::DecoderConfig d;
  d.alpha = alpha;
  d.beam_width = o.beam_width;
  d.num_groups = o.num_groups;
  d.diversity_strength = o.diversity;
  d.top_k = o.top_k;
  d.keyword_boost = o.keyword_boost;
  d.seed = seed;
  d.oov_policy = o.oov_policy == "penalize" ? ts::OovPolicy::penalize : ts::OovPolicy::reject;
  d.validate();
  return d;
}

void record_decode(ts::RunManifest& m, const DecodeOptions& o) {
  m.config["beam_width"] = std::to_string(o.beam_width);
  m.config["num_groups"] = std::to_string(o.num_groups);
  m.config["diversity"] = ts::format_number(o.diversity);
  m.config["top_k"] = std::to_string(o.top_k);
  m.config["keyword_boost"] = ts::format_number(o.keyword_boost);
  m.config["oov_policy"] = o.oov_policy;
}

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty()) std::cout << content;
  else ts::write_file(out, content);
}

std::vector<std::string> bridge_argv(const std::string& cmd) {
  std::vector<std::string> argv;
  for (auto p : ts::split_whitespace(cmd)) argv.emplace_back(p);
  if (argv.empty()) throw UsageError("--bridge needs a command");
  return argv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Melody-conditioned lyric generation"};
  app.require_subcommand(1);
  Common common;

  // train-lm
  auto* train = app.add_subcommand("train-lm", "Train an n-gram model and co-occurrence table from a corpus");
  std::string corpus, out, genre, smoothing = "kneser-ney";
  int order = 3;
  double add_k = 1.0;
  std::size_t min_count = 2;
  train->add_option("--corpus", corpus, "Lyrics corpus")->required()->check(CLI::ExistingFile);
  train->add_option("--order", order, "n-gram order");
  train->add_option("--smoothing", smoothing, "kneser-ney or add-k")->check(CLI::IsMember({"kneser-ney", "add-k"}));
  train->add_option("--k", add_k, "Add-k constant");
  train->add_option("--min-count", min_count, "Minimum count for the vocabulary");
  train->add_option("--genre", genre, "Only songs of this genre feed the co-occurrence table");
  train->add_option("--out", out, "Model bundle path")->required();
  add_seed(train, common);

  // make-data
  auto* make_data = app.add_subcommand("make-data", "Emit multi-task training data");
  std::string mix = "T1=0.25,T2=0.25,T3=0.25,T4=0.25";
  std::size_t data_kpl = 2;
  make_data->add_option("--corpus", corpus, "Lyrics corpus")->required()->check(CLI::ExistingFile);
  add_lexicon(make_data, common);
  make_data->add_option("--mix", mix, "Task ratios, e.g. T1=0.4,T2=0.2,T3=0.2,T4=0.2");
  make_data->add_option("--keywords-per-line", data_kpl, "Gold plan keywords per line");
  make_data->add_option("--out-dir", out, "Output directory")->required();
  add_seed(make_data, common);

  // compile
  auto* compile = app.add_subcommand("compile", "Compile a melody into syllable budgets and rhythm marks");
  std::string melody, constraints, mean_scope = "phrase";
  compile->add_option("--melody", melody, "Melody file")->required()->check(CLI::ExistingFile);
  compile->add_option("--mean-scope", mean_scope, "phrase or song");
  compile->add_option("--out", out, "Constraint file")->required();
  add_seed(compile, common);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Build a per-line keyword plan");
  PlanOptions plan_opts;
  std::string lm_path, plan_path;
  plan_cmd->add_option("--melody", melody, "Melody file")->check(CLI::ExistingFile);
  plan_cmd->add_option("--constraints", constraints, "Constraint file")->check(CLI::ExistingFile);
  plan_cmd->add_option("--mean-scope", mean_scope, "phrase or song");
  plan_cmd->add_option("--lm", lm_path, "Model bundle")->required()->check(CLI::ExistingFile);
  add_lexicon(plan_cmd, common);
  add_plan_options(plan_cmd, plan_opts);
  plan_cmd->add_option("--out", out, "Plan file")->required();
  add_seed(plan_cmd, common);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate lyrics for a melody");
  DecodeOptions dec;
  std::string bridge_cmd, trace_path;
  gen->add_option("--melody", melody, "Melody file")->check(CLI::ExistingFile);
  gen->add_option("--constraints", constraints, "Constraint file")->check(CLI::ExistingFile);
  gen->add_option("--mean-scope", mean_scope, "phrase or song");
  add_lexicon(gen, common);
  gen->add_option("--lm", lm_path, "Model bundle")->check(CLI::ExistingFile);
  gen->add_option("--bridge", bridge_cmd, "External model command speaking the bridge protocol");
  gen->add_option("--plan", plan_path, "Plan file (otherwise planned from --salient)")->check(CLI::ExistingFile);
  add_plan_options(gen, plan_opts);
  gen->get_option("--salient")->required(false);
  gen->add_option("--alpha", dec.alpha, "Rhythm strength in [0,1]; 0 is a hard constraint");
  add_decode_options(gen, dec);
  gen->add_option("--trace", trace_path, "Write a JSON-lines beam trace");
  gen->add_option("--out", out, "Lyrics file (default: stdout)");
  add_seed(gen, common);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score generated lyrics");
  std::string candidate, references, dangling, format = "table";
  eval->add_option("--candidate", candidate, "Generated lyrics")->required()->check(CLI::ExistingFile);
  eval->add_option("--references", references, "Reference lyrics")->check(CLI::ExistingFile);
  eval->add_option("--melody", melody, "Melody file")->check(CLI::ExistingFile);
  eval->add_option("--constraints", constraints, "Constraint file")->check(CLI::ExistingFile);
  eval->add_option("--mean-scope", mean_scope, "phrase or song");
  add_lexicon(eval, common);
  eval->add_option("--lm", lm_path, "Model bundle for perplexity")->check(CLI::ExistingFile);
  eval->add_option("--salient", plan_opts.salient, "Comma-separated salient words")->required();
  eval->add_option("--dangling", dangling, "Dangling-word list")->check(CLI::ExistingFile);
  eval->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
  eval->add_option("--out", out, "Report file (default: stdout)");
  add_seed(eval, common);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Generate and evaluate over several alpha values");
  std::string alphas = "1,0.1,0.01,0";
  sweep->add_option("--melody", melody, "Melody file")->check(CLI::ExistingFile);
  sweep->add_option("--constraints", constraints, "Constraint file")->check(CLI::ExistingFile);
  sweep->add_option("--mean-scope", mean_scope, "phrase or song");
  add_lexicon(sweep, common);
  sweep->add_option("--lm", lm_path, "Model bundle")->required()->check(CLI::ExistingFile);
  add_plan_options(sweep, plan_opts);
  sweep->add_option("--alphas", alphas, "Comma-separated alpha values");
  add_decode_options(sweep, dec);
  sweep->add_option("--out-dir", out, "Output directory")->required();
  add_seed(sweep, common);

  // bridge-check
  auto* check = app.add_subcommand("bridge-check", "Exercise an external model over the bridge protocol");
  std::size_t requests = 100;
  int timeout_ms = 10000;
  check->add_option("--bridge", bridge_cmd, "Bridge command")->required();
  check->add_option("--requests", requests, "Randomized requests to send");
  check->add_option("--timeout-ms", timeout_ms, "Per-request timeout");
  check->add_option("--out", out, "Report file (default: stdout)");
  add_seed(check, common);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run compile, plan, generate and evaluate from a config file");
  std::string config_path;
  pipe->add_option("--config", config_path, "key = value config")->required()->check(CLI::ExistingFile);
  auto* pipe_seed = pipe->add_option("--seed", common.seed, "Overrides the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto t0 = Clock::now();
  try {
    if (*train) {
      auto m = start_manifest("train-lm", common);
      m.add_input(corpus);
      ts::NGramConfig cfg;
      cfg.order = order;
      cfg.smoothing = smoothing == "add-k" ? ts::Smoothing::add_k : ts::Smoothing::kneser_ney;
      cfg.k = add_k;
      cfg.min_count = min_count;
      cfg.validate();
      auto songs = ts::parse_corpus(ts::read_file(corpus));
      auto res = ts::LanguageResources::train(songs, cfg, genre);
      ts::write_file(out, res.serialize());
      m.config["order"] = std::to_string(order);
      m.config["smoothing"] = smoothing;
      m.config["k"] = ts::format_number(add_k);
      m.config["min_count"] = std::to_string(min_count);
      m.config["genre"] = genre;
      m.outputs = {out};
      finish_manifest(m, t0, manifest_path(out));
      std::cerr << "vocabulary " << res.model.vocabulary_size() << ", songs " << songs.size() << "\n";
    } else if (*make_data) {
      auto m = start_manifest("make-data", common);
      const auto lex_path = lexicon_path(common);
      m.add_input(corpus);
      m.add_input(lex_path);
      m.config["mix"] = mix;
      m.config["keywords_per_line"] = std::to_string(data_kpl);
      auto lex = ts::Lexicon::load(lex_path);
      auto ds = ts::build_dataset(ts::parse_corpus(ts::read_file(corpus)), lex, ts::TaskMix::parse(mix), common.seed,
                                  data_kpl);
      ts::write_dataset(ds, out);
      for (const char* f : {"t1.tsv", "t2.tsv", "t3.tsv", "t4.tsv", "manifest.json"}) {
        m.outputs.push_back((fs::path(out) / f).string());
      }
      finish_manifest(m, t0, fs::path(out) / "run_manifest.json");
    } else if (*compile) {
      auto m = start_manifest("compile", common);
      m.config["mean_scope"] = mean_scope;
      auto cs = load_constraints(melody, "", parse_scope(mean_scope), m);
      ts::write_file(out, ts::to_json(cs));
      m.outputs = {out};
      finish_manifest(m, t0, manifest_path(out));
    } else if (*plan_cmd) {
      auto m = start_manifest("plan", common);
      const auto lex_path = lexicon_path(common);
      auto cs = load_constraints(melody, constraints, parse_scope(mean_scope), m);
      m.add_input(lm_path);
      m.add_input(lex_path);
      auto lex = ts::Lexicon::load(lex_path);
      auto res = ts::LanguageResources::load(lm_path);
      ts::GenerationRequest req;
      auto plan = build_plan(plan_opts, cs, &res.cooc, lex, req);
      ts::write_file(out, ts::plan_to_json(plan, &req));
      m.config["title"] = plan_opts.title;
      m.config["genre"] = plan_opts.genre;
      m.config["salient"] = plan_opts.salient;
      m.config["keywords_per_line"] = std::to_string(plan_opts.keywords_per_line);
      m.outputs = {out};
      finish_manifest(m, t0, manifest_path(out));
      std::cerr << ts::render_plan(plan, ts::singable_budgets(cs)) << "\n";
    } else if (*gen) {
      if (lm_path.empty() == bridge_cmd.empty()) throw UsageError("exactly one of --lm or --bridge is required");
      if (plan_path.empty() && plan_opts.salient.empty()) throw UsageError("one of --plan or --salient is required");
      auto m = start_manifest("generate", common);
      const auto lex_path = lexicon_path(common);
      auto cs = load_constraints(melody, constraints, parse_scope(mean_scope), m);
      m.add_input(lex_path);
      auto lex = ts::Lexicon::load(lex_path);
      std::optional<ts::LanguageResources> res;
      std::unique_ptr<ts::RemoteScorer> remote;
      if (!lm_path.empty()) {
        m.add_input(lm_path);
        res = ts::LanguageResources::load(lm_path);
      } else {
        m.config["bridge"] = bridge_cmd;
        remote = ts::connect_bridge(bridge_argv(bridge_cmd));
      }
      ts::Plan plan;
      if (!plan_path.empty()) {
        m.add_input(plan_path);
        plan = ts::parse_plan(ts::read_file(plan_path));
      } else {
        ts::GenerationRequest req;
        plan = build_plan(plan_opts, cs, res ? &res->cooc : nullptr, lex, req);
        m.config["salient"] = plan_opts.salient;
        m.config["keywords_per_line"] = std::to_string(plan_opts.keywords_per_line);
      }
      m.config["alpha"] = ts::format_number(dec.alpha);
      record_decode(m, dec);
      std::ofstream trace;
      if (!trace_path.empty()) {
        fs::path tp(trace_path);
        if (tp.has_parent_path()) fs::create_directories(tp.parent_path());
        trace.open(tp);
      }
      const ts::Scorer& scorer = res ? static_cast<const ts::Scorer&>(res->model) : *remote;
      auto result = ts::generate(plan, cs, lex, scorer, decoder_config(dec, dec.alpha, common.seed),
                                 trace_path.empty() ? nullptr : &trace);
      write_or_print(out, result.text());
      if (!out.empty()) {
        m.outputs = {out};
        if (!trace_path.empty()) m.outputs.push_back(trace_path);
        finish_manifest(m, t0, manifest_path(out));
      }
      std::cerr << "violations " << result.violations << ", keywords used " << result.keywords_used << "\n";
    } else if (*eval) {
      auto m = start_manifest("evaluate", common);
      m.add_input(candidate);
      ts::EvalInputs in;
      in.candidate = ts::read_lines(candidate);
      in.salient = comma_list(plan_opts.salient);
      ts::Lines ref_lines;
      std::optional<ts::ConstraintSet> cs;
      std::optional<ts::Lexicon> lex;
      std::optional<ts::LanguageResources> res;
      std::optional<ts::WordSet> dangling_set;
      if (!references.empty()) {
        m.add_input(references);
        ref_lines = ts::read_lines(references);
        in.references = &ref_lines;
      }
      if (!melody.empty() || !constraints.empty()) {
        cs = load_constraints(melody, constraints, parse_scope(mean_scope), m);
        const auto lex_path = lexicon_path(common);
        m.add_input(lex_path);
        lex = ts::Lexicon::load(lex_path);
        in.constraints = &*cs;
        in.lexicon = &*lex;
      }
      if (!lm_path.empty()) {
        m.add_input(lm_path);
        res = ts::LanguageResources::load(lm_path);
        in.lm = &res->model;
      }
      if (!dangling.empty()) {
        m.add_input(dangling);
        dangling_set = ts::WordSet::load(dangling);
        in.dangling = &*dangling_set;
      }
      m.config["salient"] = plan_opts.salient;
      auto report = ts::evaluate(in);
      write_or_print(out, format == "json" ? report.to_json() : report.to_table());
      if (!out.empty()) {
        m.outputs = {out};
        finish_manifest(m, t0, manifest_path(out));
      }
      std::vector<std::string> missing;
      auto need = [&](const char* name, const std::optional<double>& v) {
        if (!v) missing.emplace_back(name);
      };
      need("salient_coverage", report.salient_coverage);
      need("dist1", report.dist1);
      need("dist2", report.dist2);
      need("cropped_ratio", report.cropped_ratio);
      if (in.references) need("corpus_bleu", report.corpus_bleu);
      if (in.references) need("sentence_bleu", report.sentence_bleu);
      if (in.lm) need("perplexity", report.perplexity);
      if (in.constraints) need("stress_duration_pct", report.stress_duration_pct);
      if (!missing.empty()) {
        std::cerr << "not computable: " << ts::join(missing, ", ") << "\n";
        return 1;
      }
    } else if (*sweep) {
      auto m = start_manifest("sweep", common);
      const auto lex_path = lexicon_path(common);
      auto cs = load_constraints(melody, constraints, parse_scope(mean_scope), m);
      m.add_input(lm_path);
      m.add_input(lex_path);
      auto lex = ts::Lexicon::load(lex_path);
      auto res = ts::LanguageResources::load(lm_path);
      ts::GenerationRequest req;
      auto plan = build_plan(plan_opts, cs, &res.cooc, lex, req);
      m.config["alphas"] = alphas;
      m.config["salient"] = plan_opts.salient;
      record_decode(m, dec);
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      std::optional<double> prev;
      bool monotone = true;
      for (const auto& a : comma_list(alphas)) {
        double alpha = 0;
        try {
          alpha = std::stod(a);
        } catch (...) {
          throw UsageError("bad alpha value '" + a + "'");
        }
        auto result = ts::generate(plan, cs, lex, res.model, decoder_config(dec, alpha, common.seed));
        const fs::path lyric = fs::path(out) / ("lyrics_alpha_" + a + ".txt");
        ts::write_file(lyric, result.text());
        m.outputs.push_back(lyric.string());
        auto count = ts::stress_duration_alignment(result.lines, cs, lex);
        auto pct = count.ratio();
        if (pct && prev && *pct + 1e-12 < *prev) monotone = false;
        if (pct) prev = pct;
        rows.push_back({{"alpha", a},
                        {"stress_duration_pct", pct ? nlohmann::ordered_json(*pct) : nlohmann::ordered_json("n/a")},
                        {"matched", count.matched},
                        {"counted", count.counted},
                        {"violations", result.violations},
                        {"keywords_used", result.keywords_used}});
      }
      nlohmann::ordered_json doc{{"runs", rows}, {"monotone", monotone}};
      const fs::path report = fs::path(out) / "sweep.json";
      ts::write_file(report, doc.dump(2) + "\n");
      m.outputs.push_back(report.string());
      finish_manifest(m, t0, fs::path(out) / "manifest.json");
      std::cout << doc.dump(2) << "\n";
    } else if (*check) {
      auto m = start_manifest("bridge-check", common);
      m.config["bridge"] = bridge_cmd;
      m.config["requests"] = std::to_string(requests);
      auto remote = ts::connect_bridge(bridge_argv(bridge_cmd), std::chrono::milliseconds(timeout_ms));
      std::mt19937_64 rng(common.seed);
      const std::vector<std::string> words{"moon", "river", "wider", "than", "a", "mile", "heart", "town"};
      std::size_t ok = 0;
      for (std::size_t i = 0; i < requests; ++i) {
        ts::Context ctx;
        const std::size_t len = rng() % 5;
        for (std::size_t j = 0; j < len; ++j) ctx.history.push_back(words[rng() % words.size()]);
        if (rng() % 2) {
          auto c = remote->next_candidates(ctx, 1 + rng() % 8);
          ok += !c.empty();
        } else {
          double lp = remote->sequence_logprob(ctx.history);
          ok += lp <= 0.0;
        }
      }
      nlohmann::ordered_json doc{{"requests", requests}, {"well_formed", ok}};
      write_or_print(out, doc.dump(2) + "\n");
      if (!out.empty()) {
        m.outputs = {out};
        finish_manifest(m, t0, manifest_path(out));
      }
      if (ok != requests) return 1;
    } else if (*pipe) {
      auto cfg = ts::KeyValueConfig::load(config_path);
      if (pipe_seed->count() > 0) cfg.set("seed", std::to_string(common.seed));
      ts::Pipeline pipeline(cfg, fs::path(config_path).parent_path());
      auto result = pipeline.run();
      for (const auto& s : result.stages) {
        std::cerr << s.name << (s.skipped ? " (up to date)" : "") << "\n";
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ts::Error& e) {
    std::cerr << "error [" << ts::errc_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
