#include <doctest.h>

#include <algorithm>

#include "nap/error.hpp"
#include "nap/scenario.hpp"

using namespace nap;

namespace {
const auto ord = Universe::make(Mode::Ordinal, 3);
SetValue v(const char* code) { return parse_value(code); }

ScenarioReport run_file(const std::string& name) {
  return run_scenario_file(std::string(NAP_SCENARIO_DIR) + "/" + name);
}
} // namespace

TEST_CASE("class expressions") {
  CHECK(resolve_class(ord, "Even").contains(v("w")));
  CHECK(resolve_class(ord, "~Even").contains(v("u1")));
  CHECK(resolve_class(ord, "Below(w+2)").contains(v("w+1")));
  CHECK_FALSE(resolve_class(ord, "Below(w+2)").contains(v("w+2")));
  CHECK(resolve_class(ord, "Union(Lim,Atoms)").contains(v("u0")));
  CHECK_FALSE(resolve_class(ord, "Inter(Even,Succ)").contains(v("w")));
  CHECK(resolve_class(ord, "Diff(On,Lim)").contains(SetValue::natural(0)));
  CHECK(resolve_class(ord, "pi[Even]").contains(SetValue::natural(2)));
  CHECK_FALSE(resolve_class(ord, "pi[Even]").contains(SetValue::natural(0)));
  CHECK(resolve_class(ord, "Shift(Below(w),1)").contains(SetValue::natural(1)));
  CHECK_FALSE(resolve_class(ord, "Shift(Below(w),1)").contains(SetValue::natural(0)));
  CHECK(resolve_class(ord, "{0,w}").contains(v("w")));
  auto hf = Universe::make(Mode::Hf, 5);
  CHECK(resolve_class(hf, "Rank(1)").contains(v("{{}}")));
  CHECK(resolve_class(hf, "P(Members({{},{{}}}))").contains(v("{{}}")));
  std::map<std::string, ClassSpec> named{{"Small", ord.explicit_class({v("0")}).with_name("Small")}};
  CHECK(resolve_class(ord, "Small", named).contains(v("0")));
  CHECK_THROWS_AS(resolve_class(ord, "Bogus"), Error);
  CHECK_THROWS_AS(resolve_class(ord, "Union(Even"), Error);
}

TEST_CASE("germ expressions") {
  auto resolve = [](const std::string& s) { return resolve_class(ord, s); };
  Snapshot t{SetValue::natural(0), SetValue::natural(1), SetValue::natural(2), v("w")};
  CHECK(parse_germ("Pr(Even)", resolve).eval(t) == count_ratio(3, 4));
  CHECK(parse_germ("Pr(Even|On)", resolve).eval(t) == count_ratio(3, 4));
  CHECK(parse_germ("Pr[pi](Even)", resolve).eval(t) == 1);  // 0,1,2,w -> 2,0,4,w
  CHECK(parse_germ("2*Pr(Odd) - 1/2", resolve).eval(t) == 0);
  CHECK(parse_germ("(Pr(Even) + Pr(Odd)) / Pr(On)", resolve).eval(t) == 1);
  CHECK(parse_germ("1/2 + 1/3", resolve).op() == Germ::Op::Const);
  CHECK_THROWS_AS(parse_germ("Pr(Even", resolve), Error);
  CHECK_THROWS_AS(parse_germ("Pr(Even) +", resolve), Error);
}

TEST_CASE("empty query list") {
  auto rep = run_file("empty.json");
  CHECK(rep.exit_code == 0);
  CHECK(rep.json.at("results").empty());
  CHECK(rep.json.at("summary").at("queries") == 0);
}

TEST_CASE("ordinal theorem scenario") {
  auto rep = run_file("ordinal-theorem.json");
  CHECK(rep.exit_code == 0);
  const auto& r = rep.json.at("results").at(0);
  CHECK(r.at("status") == "ok");
  Snapshot w = parse_snapshot(r.at("witness").get<std::string>());
  CHECK(w.contains(SetValue::natural(5)));
  std::vector<std::string> kinds;
  for (const auto& c : r.at("checks")) {
    CHECK(c.at("holds") == true);
    kinds.push_back(c.at("constraint").get<std::string>());
  }
  CHECK(std::find(kinds.begin(), kinds.end(), "Ratio(Lim,Odd,3)") != kinds.end());
  CHECK(std::find(kinds.begin(), kinds.end(), "Interval(3)") != kinds.end());
  CHECK(std::find(kinds.begin(), kinds.end(), "Weight(3)") != kinds.end());
  // independent re-check
  CHECK(3 * w.count_in(ord.limits()) <= w.count_in(ord.odd()));
  CHECK(3 * w.count_in(ord.ordinals()) <= w.size());
}

TEST_CASE("even versus odd under the interval family") {
  auto rep = run_file("even-vs-odd.json");
  CHECK(rep.exit_code == 0);
  const auto& r = rep.json.at("results");
  CHECK(r.at(0).at("verdict").at("kind") == "Forced");
  CHECK(r.at(0).at("verdict").at("rule") == "R5");
  CHECK(r.at(0).at("audit").at("refutations") == 0);
  CHECK(r.at(1).at("classification") == "ApproxZero");
}

TEST_CASE("tour scenario, sequential and parallel agree") {
  auto a = run_file("tour.json");
  auto b = run_scenario_file(std::string(NAP_SCENARIO_DIR) + "/tour.json", true);
  CHECK(a.exit_code == 0);
  CHECK(a.json.dump() == b.json.dump());
  auto csv = a.render("csv");
  CHECK(csv.rfind("id,kind,status,value,verdict,rule,witness\n", 0) == 0);
  CHECK(csv.find("even-at-T,probability,ok,3/5") != std::string::npos);
}

TEST_CASE("validation") {
  CHECK(run_scenario(Json::parse(R"({"bogus": 1})")).exit_code == 2);
  CHECK(run_scenario(Json::parse(R"({"universe": {"mode": "hf", "bound": 2}})")).exit_code == 2);
  CHECK(run_scenario(Json::parse(R"({"universe": {"mode": "tree"}})")).exit_code == 2);
  CHECK(run_scenario(Json::parse(R"({"tiers": [5, 4]})")).exit_code == 2);
  CHECK(run_scenario_file("/nonexistent/scenario.json").exit_code == 2);

  auto bad_query = run_scenario(Json::parse(R"({"queries": [{"id": "x", "kind": "probability", "event": "Even", "colour": 1}]})"));
  CHECK(bad_query.exit_code == 1);
  CHECK(bad_query.json.at("results").at(0).at("status") == "error");

  auto null_cond = run_scenario(Json::parse(
      R"({"queries": [{"id": "c", "kind": "probability", "event": "Even", "given": "Lim", "snapshot": "{0,1,2}"}]})"));
  CHECK(null_cond.json.at("results").at(0).at("value") == "undefined");

  auto wrong = run_scenario(Json::parse(
      R"({"queries": [{"id": "p", "kind": "probability", "event": "Even", "snapshot": "{0,1}", "expect": {"value": "1/3"}}]})"));
  CHECK(wrong.exit_code == 1);
  CHECK(wrong.json.at("results").at(0).at("status") == "failed");
}

TEST_CASE("demos pass") {
  for (const char* name : {"euclidean", "hume-failure", "translation-failure", "powerset-chain", "pn-iteration"}) {
    auto d = run_demo(name, 3);
    CHECK_MESSAGE(d.at("pass") == true, name);
  }
  CHECK_THROWS_AS(run_demo("nope", 0), Error);
}

TEST_CASE("bootstrap queries") {
  auto rep = run_scenario(Json::parse(R"({
    "universe": {"mode": "hf", "bound": 5},
    "queries": [
      {"id": "r", "kind": "restriction", "top_size": 12,
       "windows": [[0,1,2,3,4,5,6,7,8,9], [0,1,2,3,4,5,6,7], [0,1,2,3,4]]},
      {"id": "c", "kind": "coherence", "top_size": 12, "t": [0,1,2,3,4,5,6,7], "event": [0,2,4,9]},
      {"id": "x", "kind": "counterexample"}
    ]})"));
  CHECK(rep.exit_code == 0);
  for (const auto& r : rep.json.at("results")) CHECK_MESSAGE(r.at("status") == "ok", r.dump());
}
