#ifndef NAP_SCENARIO_HPP
#define NAP_SCENARIO_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "nap/bootstrap.hpp"
#include "nap/constraint.hpp"
#include "nap/germ.hpp"
#include "nap/universe.hpp"

namespace nap {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

using ClassResolver = std::function<ClassSpec(const std::string&)>;

/// Class expressions: V On Even Odd Lim Succ Atoms NonOrd Empty, Below(code),
/// Rank(n), P(X), Fin(X), Members(code), ~X, pi[X], Shift(X,code),
/// Union(X,Y), Inter(X,Y), Diff(X,Y), {code,...}, or a name from `named`.
/// Throws ParseError on unknown names.
ClassSpec resolve_class(const Universe& u, const std::string& text,
                        const std::map<std::string, ClassSpec>& named = {});

/// "id" or "pi". Throws ParseError otherwise.
RandomVariable resolve_rv(const std::string& name);

/// Germ expressions: Pr(A), Pr(A|B), Pr[pi](A), integers, + - * / and
/// parentheses. Constant subexpressions are folded, so "1/2" is Const(1/2).
Germ parse_germ(const std::string& text, const ClassResolver& resolve);

struct ScenarioContext {
  Universe universe;
  FilterBase base;
  std::uint64_t seed = 0;
  TierConfig tiers{{5, 9, 13, 17}};
  std::map<std::string, ClassSpec> named;

  ClassResolver resolver() const;
};

/// Universe from {"mode": "hf"|"ordinal", "bound": n, "window": w}.
Universe universe_from_json(const Json& j);

/// Filter base from {"builder": "none"|"fineness"|"parametric"|"explicit"|"powerset-stage", ...}.
FilterBase base_from_json(const Universe& u, const Json& j, const ClassResolver& resolve, std::uint64_t seed);

/// One query; the result carries "status": "ok", "failed" or "error".
OrderedJson run_query(const ScenarioContext& ctx, const Json& query);

/// Named theorem demonstrations: euclidean, hume-failure, translation-failure,
/// powerset-chain, pn-iteration. Throws ValidationError for other names.
OrderedJson run_demo(const std::string& name, std::uint64_t seed);

struct ScenarioReport {
  OrderedJson json;
  int exit_code = 0;  // 0 ok, 1 query failure, 2 validation, 3 internal
  std::string format = "json";  // from the scenario's output options
  std::string render(const std::string& format) const;  // "json" or "csv"
};

ScenarioReport run_scenario(const Json& doc, std::optional<bool> parallel = std::nullopt);
ScenarioReport run_scenario_file(const std::string& path, std::optional<bool> parallel = std::nullopt);

} // namespace nap

#endif
