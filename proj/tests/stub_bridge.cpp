// Bridge-protocol test server. argv[1] selects behaviour:
// ok, wrong-id, silent, garbage, error, bad-version, die.
#include <iostream>
#include <string>

#include <json.hpp>

#include "stub_model.hpp"

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "ok";
  stub::Model model;
  std::string line;
  while (std::getline(std::cin, line)) {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      std::cout << nlohmann::json{{"id", nullptr}, {"error", "malformed request"}}.dump() << std::endl;
      continue;
    }
    const auto id = req.value("id", nlohmann::json());
    const auto op = req.value("op", std::string());
    nlohmann::json resp{{"id", id}};
    if (op == "hello") {
      resp["ok"] = true;
      resp["version"] = mode == "bad-version" ? "0" : "1";
      std::cout << resp.dump() << std::endl;
      continue;
    }
    if (mode == "silent") continue;
    if (mode == "die") return 0;
    if (mode == "garbage") {
      std::cout << "{not json" << std::endl;
      continue;
    }
    if (mode == "wrong-id") resp["id"] = id.is_number_integer() ? id.get<long long>() + 1 : -1;
    if (mode == "error") {
      resp["error"] = "model unavailable";
    } else if (op == "next") {
      tunesmith::Context ctx;
      ctx.history = req.at("context").get<std::vector<std::string>>();
      nlohmann::json cands = nlohmann::json::array();
      for (const auto& c : model.next_candidates(ctx, req.at("top_k").get<std::size_t>())) {
        cands.push_back({{"word", c.word}, {"logprob", c.logprob}});
      }
      resp["candidates"] = cands;
    } else if (op == "score") {
      auto words = req.at("words").get<std::vector<std::string>>();
      resp["logprob"] = model.sequence_logprob(words);
    } else {
      resp["error"] = "unsupported op '" + op + "'";
    }
    std::cout << resp.dump() << std::endl;
  }
  return 0;
}
