#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nap/audit.hpp"
#include "nap/error.hpp"
#include "nap/scenario.hpp"

using nap::Json;

namespace {

struct UniverseOpts {
  std::string mode = "ordinal";
  unsigned rank = 5;
  unsigned omega_bound = 3;
  std::uint64_t seed = 0;
  std::string base = "none";
  std::string out = "json";
};

void add_universe_flags(CLI::App* app, UniverseOpts& o) {
  app->add_option("--universe", o.mode, "hf or ordinal")->check(CLI::IsMember({"hf", "ordinal"}));
  app->add_option("--rank", o.rank, "HF universe: sets of rank below this bound");
  app->add_option("--omega-bound", o.omega_bound, "ordinal universe: ordinals below omega times this bound");
  app->add_option("--seed", o.seed, "seed for enumeration choices");
  app->add_option("--base", o.base,
                  "none, fineness, parametric, powerset-stage, a file of constraint keys, or keys separated by ';'");
  app->add_option("--out", o.out, "report format")->check(CLI::IsMember({"json", "csv"}));
}

Json base_recipe(const std::string& recipe) {
  if (recipe == "none" || recipe == "fineness" || recipe == "parametric" || recipe == "powerset-stage")
    return Json{{"builder", recipe}};
  std::vector<std::string> keys;
  if (std::filesystem::is_regular_file(recipe)) {
    std::ifstream in(recipe);
    for (std::string line; std::getline(in, line);)
      if (!line.empty() && line[0] != '#') keys.push_back(line);
  } else {
    std::stringstream ss(recipe);
    for (std::string k; std::getline(ss, k, ';');)
      if (!k.empty()) keys.push_back(k);
  }
  return Json{{"builder", "explicit"}, {"constraints", keys}};
}

Json scenario_for(const UniverseOpts& o, Json query) {
  Json doc;
  doc["universe"] = {{"mode", o.mode}, {"bound", o.mode == "hf" ? o.rank : o.omega_bound}};
  doc["seed"] = o.seed;
  doc["base"] = base_recipe(o.base);
  doc["queries"] = Json::array({std::move(query)});
  return doc;
}

// "A,B,n" with class expressions that may contain commas inside brackets.
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::size_t> index_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& x : split_args(s))
    if (!x.empty()) out.push_back(std::stoul(x));
  return out;
}

int emit(const nap::ScenarioReport& rep, const std::string& format) {
  std::cout << rep.render(rep.json.contains("results") ? format : "json");
  return rep.exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"napctl: exact non-Archimedean probabilities on desk-scale universes"};
  app.require_subcommand(1);

  // query
  UniverseOpts qo;
  std::string event, given, rv = "id", snapshot;
  auto* query = app.add_subcommand("query", "probability of an event, with its infinitesimal classification");
  add_universe_flags(query, qo);
  query->add_option("--event", event, "class expression, e.g. Even or Below(w+1)")->required();
  query->add_option("--given", given, "conditioning class");
  query->add_option("--rv", rv, "random variable: id or pi")->check(CLI::IsMember({"id", "pi"}));
  query->add_option("--snapshot", snapshot, "evaluate at this snapshot, e.g. {0,1,2}");

  // witness
  UniverseOpts wo;
  std::string builder;
  std::vector<std::string> pins, pairs, lts, ges;
  std::uint64_t k = 1, l = 1, m = 1;
  std::string start;
  auto* witness = app.add_subcommand("witness", "build a finite snapshot satisfying a constraint set");
  add_universe_flags(witness, wo);
  witness->add_option("builder", builder, "superreg, powerset or ordinal")
      ->required()
      ->check(CLI::IsMember({"superreg", "powerset", "ordinal"}));
  witness->add_option("--pin", pins, "a value the witness must contain (repeatable)");
  witness->add_option("--pair", pairs, "A,B,n ratio pair (repeatable)");
  witness->add_option("--k", k, "ordinal builder: ratio parameter");
  witness->add_option("--l", l, "ordinal builder: interval parameter");
  witness->add_option("--m", m, "ordinal builder: weight parameter");
  witness->add_option("--lt", lts, "powerset builder: A,B for P(A) < P(B) (repeatable)");
  witness->add_option("--ge", ges, "powerset builder: A,B for P(A) >= P(B) (repeatable)");
  witness->add_option("--start", start, "powerset builder: snapshot to extend");

  // check
  UniverseOpts co;
  std::string check_kind, tiers = "5,9,13,17", t_idx, s_idx, ev = "V";
  std::size_t top_size = 12;
  std::vector<std::string> windows;
  auto* check = app.add_subcommand("check", "finite intersection, coherence, restriction or counterexample checks");
  add_universe_flags(check, co);
  check->add_option("kind", check_kind, "fip, coherence, restriction or counterexample")
      ->required()
      ->check(CLI::IsMember({"fip", "coherence", "restriction", "counterexample"}));
  check->add_option("--tiers", tiers, "tier thresholds, e.g. 5,9,13,17");
  check->add_option("--top-size", top_size, "window size (at most 16)");
  check->add_option("--t", t_idx, "coherence: inner window as indices, e.g. 0,1,2,3,4");
  check->add_option("--s", s_idx, "coherence: outer window (default: the whole window)");
  check->add_option("--event", ev, "coherence: event class");
  check->add_option("--window", windows, "restriction: a window as indices (repeatable)");

  // demo
  std::string demo_name;
  std::uint64_t demo_seed = 0;
  std::string demo_out = "json";
  auto* demo = app.add_subcommand("demo", "theorem demonstrations");
  demo->add_option("name", demo_name, "euclidean, hume-failure, translation-failure, powerset-chain, pn-iteration")
      ->required()
      ->check(CLI::IsMember({"euclidean", "hume-failure", "translation-failure", "powerset-chain", "pn-iteration"}));
  demo->add_option("--seed", demo_seed);
  demo->add_option("--out", demo_out)->check(CLI::IsMember({"json", "csv"}));

  // audit
  nap::AuditOptions ao;
  auto* audit = app.add_subcommand("audit", "run the full invariant suite (criteria 1-10)");
  audit->add_option("--budget", ao.budget, "multiplier for the randomized case counts");
  audit->add_option("--seed", ao.seed);
  audit->add_option("--witnesses", ao.soundness_witnesses, "fresh witnesses per Forced verdict");

  // run
  std::string path, run_out;
  bool parallel = false;
  auto* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("scenario", path, "scenario JSON file")->required();
  run->add_option("--out", run_out, "override the scenario's output format")->check(CLI::IsMember({"json", "csv"}));
  run->add_flag("--parallel", parallel, "run independent queries concurrently");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*query) {
      Json q{{"id", "query"}, {"kind", "probability"}, {"event", event}, {"rv", rv}};
      if (!given.empty()) q["given"] = given;
      if (!snapshot.empty()) q["snapshot"] = snapshot;
      return emit(nap::run_scenario(scenario_for(qo, q)), qo.out);
    }
    if (*witness) {
      Json q{{"id", "witness"}, {"kind", "witness"}, {"builder", builder}, {"pins", pins}};
      Json pj = Json::array();
      for (const auto& p : pairs) {
        auto parts = split_args(p);
        if (parts.size() != 3) throw nap::Error(nap::ErrorCode::ParseError, "--pair takes A,B,n");
        pj.push_back({{"a", parts[0]}, {"b", parts[1]}, {"n", std::stoull(parts[2])}});
      }
      if (!pj.empty()) q["pairs"] = pj;
      if (builder == "ordinal") {
        q["k"] = k;
        q["l"] = l;
        q["m"] = m;
      }
      for (auto [key, list] : {std::pair{"lt", &lts}, std::pair{"ge", &ges}}) {
        Json arr = Json::array();
        for (const auto& x : *list) arr.push_back(split_args(x));
        if (!arr.empty()) q[key] = arr;
      }
      if (!start.empty()) q["start"] = start;
      return emit(nap::run_scenario(scenario_for(wo, q)), wo.out);
    }
    if (*check) {
      Json q{{"id", check_kind}, {"kind", check_kind}};
      if (check_kind == "coherence") {
        q["top_size"] = top_size;
        q["t"] = index_list(t_idx);
        if (!s_idx.empty()) q["s"] = index_list(s_idx);
        q["event"] = ev;
      } else if (check_kind == "restriction") {
        q["top_size"] = top_size;
        Json ws = Json::array();
        for (const auto& w : windows) ws.push_back(index_list(w));
        q["windows"] = ws;
      }
      Json doc = scenario_for(co, q);
      doc["tiers"] = index_list(tiers);
      return emit(nap::run_scenario(doc), co.out);
    }
    if (*demo) {
      Json doc{{"seed", demo_seed}, {"queries", Json::array({{{"id", demo_name}, {"kind", "demo"}, {"name", demo_name}}})}};
      return emit(nap::run_scenario(doc), demo_out);
    }
    if (*audit) {
      auto results = nap::run_acceptance(ao, [](const nap::CriterionResult& r) { std::cout << r.line() << std::endl; });
      bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
      return all ? 0 : 1;
    }
    if (*run) {
      auto rep = nap::run_scenario_file(path, parallel ? std::optional<bool>(true) : std::nullopt);
      return emit(rep, run_out.empty() ? rep.format : run_out);
    }
  } catch (const nap::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == nap::ErrorCode::ParseError || e.code() == nap::ErrorCode::ValidationError ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
