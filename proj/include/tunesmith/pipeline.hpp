/**
 * @file pipeline.hpp
 * @brief Run manifests, key-value configs, model bundles and the staged
 *        compile -> plan -> generate -> evaluate pipeline.
 */
#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunesmith/corpus.hpp"
#include "tunesmith/decoder.hpp"
#include "tunesmith/error.hpp"
#include "tunesmith/melody.hpp"
#include "tunesmith/metrics.hpp"
#include "tunesmith/ngram.hpp"
#include "tunesmith/phonetics.hpp"
#include "tunesmith/planner.hpp"
#include "tunesmith/text.hpp"

namespace tunesmith {

namespace fs = std::filesystem;

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::io, "sha256 failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

inline std::string file_digest(const fs::path& path) { return sha256_hex(read_file(path)); }

/// "key = value" lines, '#' comments. Later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text) {
    KeyValueConfig c;
    std::size_t lineno = 0;
    for (auto raw : split_lines(text)) {
      ++lineno;
      auto line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(Errc::parse, "config line " + std::to_string(lineno) + ": expected key = value");
      }
      auto key = std::string(trim(line.substr(0, eq)));
      if (key.empty()) throw Error(Errc::parse, "config line " + std::to_string(lineno) + ": empty key");
      c.values_[key] = std::string(trim(line.substr(eq + 1)));
    }
    return c;
  }

  static KeyValueConfig load(const fs::path& path) { return parse(read_file(path)); }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback = "") const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) throw Error(Errc::config, "missing required key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
      std::size_t used = 0;
      double v = std::stod(get(key), &used);
      if (used != get(key).size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      throw Error(Errc::config, "key '" + key + "' is not a number: " + get(key));
    }
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    for (const auto& item : split(get(key), ',')) {
      auto t = trim(item);
      if (!t.empty()) out.emplace_back(t);
    }
    return out;
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Written beside every command's outputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double elapsed_ms = 0.0;

  void add_input(const fs::path& p) { inputs[p.string()] = file_digest(p); }

  std::string to_json() const {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["inputs"] = inputs;
    doc["seed"] = seed;
    doc["outputs"] = outputs;
    doc["elapsed_ms"] = elapsed_ms;
    return doc.dump(2) + "\n";
  }

  void write(const fs::path& path) const { write_file(path, to_json()); }
};

/// The n-gram model and the co-occurrence table it was trained with, in one file.
struct LanguageResources {
  NGramModel model;
  CooccurrenceTable cooc;

  static constexpr std::string_view kSeparator = "---\n";

  std::string serialize() const { return model.serialize() + std::string(kSeparator) + cooc.serialize(); }

  static LanguageResources parse(std::string_view text) {
    auto pos = text.find("\n---\n");
    if (pos == std::string_view::npos) {
      return LanguageResources{NGramModel::parse(text), CooccurrenceTable{}};
    }
    return LanguageResources{NGramModel::parse(text.substr(0, pos + 1)),
                             CooccurrenceTable::parse(text.substr(pos + 5))};
  }

  static LanguageResources load(const fs::path& path) { return parse(read_file(path)); }

  static LanguageResources train(const std::vector<Song>& songs, const NGramConfig& cfg, std::string_view genre = {}) {
    return LanguageResources{NGramModel::train(corpus_lines(songs), cfg), CooccurrenceTable::build(songs, genre)};
  }
};

inline std::string format_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

inline DecoderConfig decoder_config_from(const KeyValueConfig& c) {
  DecoderConfig d;
  d.alpha = c.number("alpha", d.alpha);
  d.beam_width = static_cast<std::size_t>(c.number("beam_width", static_cast<double>(d.beam_width)));
  d.num_groups = static_cast<std::size_t>(c.number("num_groups", static_cast<double>(d.num_groups)));
  d.diversity_strength = c.number("diversity", d.diversity_strength);
  d.top_k = static_cast<std::size_t>(c.number("top_k", static_cast<double>(d.top_k)));
  d.keyword_boost = c.number("keyword_boost", d.keyword_boost);
  d.seed = static_cast<std::uint64_t>(c.number("seed", 0));
  auto oov = c.get("oov_policy", "reject");
  if (oov == "reject") d.oov_policy = OovPolicy::reject;
  else if (oov == "penalize") d.oov_policy = OovPolicy::penalize;
  else throw Error(Errc::config, "oov_policy must be reject or penalize");
  d.validate();
  return d;
}

inline NGramConfig ngram_config_from(const KeyValueConfig& c) {
  NGramConfig n;
  n.order = static_cast<int>(c.number("order", n.order));
  auto sm = c.get("smoothing", "kneser-ney");
  if (sm == "kneser-ney" || sm == "interpolated-backoff") n.smoothing = Smoothing::kneser_ney;
  else if (sm == "add-k") n.smoothing = Smoothing::add_k;
  else throw Error(Errc::config, "smoothing must be kneser-ney or add-k");
  n.k = c.number("k", n.k);
  n.min_count = static_cast<std::size_t>(c.number("min_count", static_cast<double>(n.min_count)));
  n.validate();
  return n;
}

inline std::size_t singable_phrases(const ConstraintSet& cs) {
  std::size_t n = 0;
  for (auto b : cs.budgets) n += b > 0;
  return n;
}

inline std::vector<std::size_t> singable_budgets(const ConstraintSet& cs) {
  std::vector<std::size_t> out;
  for (auto b : cs.budgets) {
    if (b > 0) out.push_back(b);
  }
  return out;
}

inline Lines read_lines(const fs::path& p) {
  Lines out;
  const std::string text = read_file(p);
  for (auto l : split_lines(text)) out.emplace_back(l);
  return out;
}

struct StageReport {
  std::string name;
  bool skipped = false;
  std::vector<std::string> outputs;
};

struct PipelineResult {
  std::vector<StageReport> stages;
  std::vector<std::string> artifacts;

  std::size_t ran() const {
    std::size_t n = 0;
    for (const auto& s : stages) n += !s.skipped;
    return n;
  }
};

/// Staged run driven by a key-value config. Required keys: lexicon, melody,
/// out_dir, salient, and either lm (a trained bundle) or corpus. A comma list
/// in alpha turns the generate/evaluate stages into a sweep.
/// Stage state lives in out_dir/stages.json; a stage whose input digest and
/// outputs are unchanged is skipped.
class Pipeline {
 public:
  explicit Pipeline(KeyValueConfig config, fs::path base_dir = {})
      : config_(std::move(config)), base_(std::move(base_dir)) {}

  PipelineResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    out_ = resolve(config_.require("out_dir"));
    fs::create_directories(out_);
    load_state();
    PipelineResult result;

    fs::path lm_path;
    if (config_.has("lm")) {
      lm_path = resolve(config_.get("lm"));
      if (!fs::exists(lm_path)) throw Error(Errc::stage, "plan stage needs the model bundle " + lm_path.string());
    } else {
      const fs::path corpus = existing("corpus", "train");
      lm_path = out_ / "model.lm";
      stage(result, "train", {corpus}, {"order", "smoothing", "k", "min_count", "genre"}, {lm_path}, [&] {
        auto songs = parse_corpus(read_file(corpus));
        auto res = LanguageResources::train(songs, ngram_config_from(config_), config_.get("genre"));
        write_file(lm_path, res.serialize());
      });
    }

    const fs::path melody = existing("melody", "compile");
    const fs::path constraints_path = out_ / "constraints.json";
    stage(result, "compile", {melody}, {"mean_scope"}, {constraints_path}, [&] {
      auto scope = config_.get("mean_scope", "phrase") == "song" ? MeanScope::per_song : MeanScope::per_phrase;
      write_file(constraints_path, to_json(compile_constraints(parse_melody(read_file(melody)), scope)));
    });

    const fs::path lexicon_path = existing("lexicon", "plan");
    const fs::path plan_path = out_ / "plan.json";
    stage(result, "plan", {constraints_path, lm_path, lexicon_path},
          {"title", "genre", "salient", "keywords_per_line"}, {plan_path}, [&] {
            auto cs = parse_constraints(read_file(constraints_path));
            GenerationRequest req = request_for(cs);
            auto res = resources(lm_path);
            write_file(plan_path, plan_to_json(make_plan(req, res.cooc, &lexicon(lexicon_path)), &req));
          });

    auto alphas = config_.list("alpha");
    if (alphas.empty()) alphas.push_back(format_number(DecoderConfig{}.alpha));
    std::vector<fs::path> lyric_paths;
    for (const auto& a : alphas) {
      lyric_paths.push_back(alphas.size() == 1 ? out_ / "lyrics.txt" : out_ / ("lyrics_alpha_" + a + ".txt"));
    }
    stage(result, "generate", {constraints_path, plan_path, lm_path, lexicon_path},
          {"alpha", "beam_width", "num_groups", "diversity", "top_k", "keyword_boost", "seed", "oov_policy"},
          lyric_paths, [&] {
            auto cs = parse_constraints(read_file(constraints_path));
            auto plan = parse_plan(read_file(plan_path));
            auto& res = resources(lm_path);
            const auto& lex = lexicon(lexicon_path);
            for (std::size_t i = 0; i < alphas.size(); ++i) {
              KeyValueConfig c = config_;
              c.set("alpha", alphas[i]);
              auto out = generate(plan, cs, lex, res.model, decoder_config_from(c));
              write_file(lyric_paths[i], out.text());
            }
          });

    std::vector<fs::path> eval_inputs = lyric_paths;
    eval_inputs.insert(eval_inputs.end(), {constraints_path, lm_path, lexicon_path});
    std::optional<fs::path> refs;
    if (config_.has("references")) {
      refs = existing("references", "evaluate");
      eval_inputs.push_back(*refs);
    }
    const fs::path report_path = out_ / (alphas.size() == 1 ? "report.json" : "sweep.json");
    stage(result, "evaluate", eval_inputs, {"salient"}, {report_path}, [&] {
      auto cs = parse_constraints(read_file(constraints_path));
      auto& res = resources(lm_path);
      const auto& lex = lexicon(lexicon_path);
      Lines ref_lines;
      if (refs) ref_lines = read_lines(*refs);
      auto salient = config_.list("salient");
      nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
      std::string single;
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        EvalInputs in;
        in.candidate = read_lines(lyric_paths[i]);
        in.salient = salient;
        in.references = refs ? &ref_lines : nullptr;
        in.constraints = &cs;
        in.lexicon = &lex;
        in.lm = &res.model;
        auto report = evaluate(in);
        if (alphas.size() == 1) single = report.to_json();
        sweep.push_back({{"alpha", alphas[i]}, {"report", nlohmann::ordered_json::parse(report.to_json())}});
      }
      write_file(report_path, alphas.size() == 1 ? single : sweep.dump(2) + "\n");
    });

    save_state();
    for (const auto& s : result.stages) result.artifacts.insert(result.artifacts.end(), s.outputs.begin(), s.outputs.end());

    RunManifest m;
    m.command = "pipeline";
    m.config = config_.values();
    m.seed = static_cast<std::uint64_t>(config_.number("seed", 0));
    for (const auto& [k, v] : config_.values()) {
      if (k == "lexicon" || k == "corpus" || k == "melody" || k == "lm" || k == "references") m.add_input(resolve(v));
    }
    m.outputs = result.artifacts;
    m.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    m.write(out_ / "manifest.json");
    return result;
  }

 private:
  template <typename Fn>
  void stage(PipelineResult& result, const std::string& name, const std::vector<fs::path>& inputs,
             const std::vector<std::string>& keys, const std::vector<fs::path>& outputs, Fn&& body) {
    std::string material = name + "\n";
    for (const auto& in : inputs) {
      if (!fs::exists(in)) throw Error(Errc::stage, name + " stage needs " + in.string());
      material += in.filename().string() + " " + file_digest(in) + "\n";
    }
    for (const auto& k : keys) material += k + "=" + config_.get(k) + "\n";
    const std::string digest = sha256_hex(material);

    StageReport rep{name, false, {}};
    for (const auto& o : outputs) rep.outputs.push_back(o.string());
    bool done = state_.contains(name) && state_[name].value("digest", "") == digest;
    for (const auto& o : outputs) done = done && fs::exists(o);
    if (done) {
      rep.skipped = true;
    } else {
      body();
      state_[name] = {{"digest", digest}};
      save_state();
    }
    result.stages.push_back(std::move(rep));
  }

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() || base_.empty() ? path : base_ / path;
  }

  fs::path existing(const std::string& key, const std::string& stage_name) const {
    if (!config_.has(key)) throw Error(Errc::stage, stage_name + " stage needs '" + key + "' in the config");
    auto p = resolve(config_.get(key));
    if (!fs::exists(p)) throw Error(Errc::stage, stage_name + " stage needs " + p.string());
    return p;
  }

  GenerationRequest request_for(const ConstraintSet& cs) const {
    GenerationRequest req;
    req.title = config_.get("title");
    req.genre = config_.get("genre");
    req.salient_words = config_.list("salient");
    req.num_lines = singable_phrases(cs);
    req.keywords_per_line = static_cast<std::size_t>(config_.number("keywords_per_line", 1));
    return req;
  }

  const Lexicon& lexicon(const fs::path& p) {
    if (!lexicon_) lexicon_ = Lexicon::load(p);
    return *lexicon_;
  }

  LanguageResources& resources(const fs::path& p) {
    if (!resources_) resources_ = LanguageResources::load(p);
    return *resources_;
  }

  void load_state() {
    const auto p = out_ / "stages.json";
    state_ = nlohmann::json::object();
    if (fs::exists(p)) {
      try {
        state_ = nlohmann::json::parse(read_file(p));
      } catch (const nlohmann::json::exception&) {
        state_ = nlohmann::json::object();
      }
    }
  }

  void save_state() const { write_file(out_ / "stages.json", state_.dump(2) + "\n"); }

  KeyValueConfig config_;
  fs::path base_;
  fs::path out_;
  nlohmann::json state_;
  std::optional<Lexicon> lexicon_;
  std::optional<LanguageResources> resources_;
};

}  // namespace tunesmith
