#include "nap/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "nap/error.hpp"
#include "nap/filter_base.hpp"
#include "nap/verdict.hpp"
#include "nap/witness.hpp"

namespace nap {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\n\r");
  return s.substr(b, e - b + 1);
}

bool opener(char c) { return c == '(' || c == '[' || c == '{'; }
bool closer(char c) { return c == ')' || c == ']' || c == '}'; }

// Splits on `sep` outside brackets.
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (opener(c)) ++depth;
    if (closer(c)) --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// Index of the bracket closing the one at `open`, or npos.
std::size_t matching(const std::string& s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (opener(s[i])) ++depth;
    if (closer(s[i]) && --depth == 0) return i;
  }
  return std::string::npos;
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }
[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      invalid("unknown field '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) invalid(where + " needs a string '" + key + "'");
  return j.at(key).get<std::string>();
}

std::vector<SetValue> parse_values(const Json& j) {
  std::vector<SetValue> out;
  if (j.is_string()) {
    auto s = parse_value(j.get<std::string>());
    if (s.kind() != ValueKind::Set) parse_fail("expected a set code");
    return {s.members().begin(), s.members().end()};
  }
  if (!j.is_array()) invalid("expected a list of value codes");
  for (const auto& x : j) {
    if (!x.is_string()) invalid("value codes must be strings");
    out.push_back(parse_value(x.get<std::string>()));
  }
  return out;
}

std::vector<std::string> keys_of(const std::vector<Constraint>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.key());
  return out;
}

OrderedJson verdict_json(const Verdict& v) {
  OrderedJson j;
  j["kind"] = to_string(v.kind);
  j["rule"] = v.rule;
  j["claim"] = v.claim;
  j["cited"] = keys_of(v.cited);
  std::vector<std::string> obs;
  for (const auto& o : v.obligations) obs.push_back(o.text());
  j["obligations"] = obs;
  OrderedJson ev = OrderedJson::array();
  for (const auto& e : v.evidence) {
    OrderedJson x;
    x["snapshot"] = e.snapshot.code();
    x["lhs"] = e.lhs ? to_string(*e.lhs) : "undefined";
    x["rhs"] = e.rhs ? to_string(*e.rhs) : "undefined";
    ev.push_back(std::move(x));
  }
  j["evidence"] = ev;
  if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
  return j;
}

OrderedJson checks_json(const Snapshot& f, const std::vector<Constraint>& cs, Mode mode, bool& all) {
  OrderedJson out = OrderedJson::array();
  for (const auto& c : cs) {
    bool holds = constraint_membership(c, f, mode);
    all = all && holds;
    OrderedJson x;
    x["constraint"] = c.key();
    x["holds"] = holds;
    out.push_back(std::move(x));
  }
  return out;
}

// Records one expectation; returns false on mismatch.
bool expect_eq(OrderedJson& assertions, const std::string& name, const std::string& expected,
               const std::string& actual) {
  OrderedJson a;
  a["name"] = name;
  a["expected"] = expected;
  a["actual"] = actual;
  a["pass"] = expected == actual;
  assertions.push_back(std::move(a));
  return expected == actual;
}

std::vector<RatioPair> pairs_from(const Json& j, const ClassResolver& resolve) {
  std::vector<RatioPair> out;
  if (j.is_null()) return out;
  if (!j.is_array()) invalid("'pairs' must be a list");
  for (const auto& p : j) {
    check_keys(p, {"a", "b", "n"}, "pair");
    out.push_back({resolve(require_string(p, "a", "pair")), resolve(require_string(p, "b", "pair")),
                   get_or<std::uint64_t>(p, "n", 1)});
  }
  return out;
}

Mask mask_from(const Json& j, std::size_t top_size, const std::string& what) {
  if (!j.is_array()) invalid(what + " must be a list of window indices");
  Mask m = 0;
  for (const auto& x : j) {
    auto i = x.get<std::uint64_t>();
    if (i >= top_size) invalid(what + " index out of range");
    m |= Mask{1} << i;
  }
  return m;
}

std::vector<SetValue> top_window(const Universe& u, std::size_t n) {
  if (n > 16) invalid("top_size is at most 16");
  std::vector<SetValue> top;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto x = u.element_at(i);
    if (!x) invalid("the universe has fewer than top_size elements");
    top.push_back(*x);
  }
  return top;
}

OrderedJson audit_json(const PropertyAudit& a) {
  OrderedJson j;
  j["fine"] = a.fine;
  j["fip"] = a.fip;
  j["ultra"] = a.ultra;
  j["non_principal"] = a.non_principal;
  j["no_empty"] = a.no_empty;
  j["notes"] = a.notes;
  return j;
}

// Power-class chain P^n(A1) < P^n(A2) < P^n(A3) = P^n(A4) in the ordinal universe.
OrderedJson chain_json(const Universe& u, unsigned n) {
  const ClassSpec a[4] = {u.limits(), u.successors(), u.even(), u.union_of(u.atoms(), u.odd())};
  std::vector<ClassSpec> p;
  for (const auto& x : a) p.push_back(iterated_power(u, x, n));
  std::vector<Constraint> lifted{Constraint::order_lt(p[0], p[1]), Constraint::order_lt(p[1], p[2]),
                                 Constraint::order_ge(p[2], p[3]), Constraint::order_ge(p[3], p[2])};
  auto f = powerset_witness_extend(u, Snapshot{SetValue::natural(0)}, lifted, {});
  OrderedJson j;
  j["n"] = n;
  j["constraints"] = keys_of(lifted);
  j["witness"] = f.code();
  std::vector<std::size_t> counts;
  for (const auto& c : p) counts.push_back(f.count_in(c));
  j["counts"] = counts;
  bool all = true;
  j["checks"] = checks_json(f, lifted, u.mode(), all);
  j["pass"] = all && counts[0] < counts[1] && counts[1] < counts[2] && counts[2] == counts[3];
  return j;
}

} // namespace

ClassSpec resolve_class(const Universe& u, const std::string& raw, const std::map<std::string, ClassSpec>& named) {
  const std::string text = trim(raw);
  if (text.empty()) parse_fail("empty class name");
  if (auto it = named.find(text); it != named.end()) return it->second;
  auto rec = [&](const std::string& s) { return resolve_class(u, s, named); };
  if (text[0] == '~') return u.complement(rec(text.substr(1)));
  if (text[0] == '{') {
    auto x = parse_value(text);
    if (x.kind() != ValueKind::Set) parse_fail(text + " is not a set");
    return u.explicit_class({x.members().begin(), x.members().end()});
  }
  if (text.rfind("pi[", 0) == 0 && text.back() == ']')
    return image_class(u, invar_permutation(), rec(text.substr(3, text.size() - 4)));
  static const std::map<std::string, ClassSpec (Universe::*)() const> plain{
      {"V", &Universe::everything},     {"Empty", &Universe::empty_class}, {"On", &Universe::ordinals},
      {"Even", &Universe::even},        {"Odd", &Universe::odd},           {"Lim", &Universe::limits},
      {"Succ", &Universe::successors}, {"Atoms", &Universe::atoms},       {"NonOrd", &Universe::non_ordinals}};
  if (auto it = plain.find(text); it != plain.end()) return (u.*(it->second))();
  auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')' || matching(text, open) != text.size() - 1)
    parse_fail("unknown class '" + text + "'");
  const std::string fn = text.substr(0, open);
  const auto args = split_top(text.substr(open + 1, text.size() - open - 2), ',');
  auto want = [&](std::size_t n) {
    if (args.size() != n) parse_fail(fn + " takes " + std::to_string(n) + " argument(s)");
  };
  if (fn == "Below") { want(1); return u.below(parse_value(args[0])); }
  if (fn == "Rank") { want(1); return u.rank_level(static_cast<unsigned>(std::stoul(args[0]))); }
  if (fn == "P") { want(1); return u.power_class(rec(args[0])); }
  if (fn == "Fin") { want(1); return u.finite_subsets(rec(args[0])); }
  if (fn == "Members") { want(1); return u.members_of(parse_value(args[0])); }
  if (fn == "Shift") { want(2); return translate_class(u, rec(args[0]), parse_value(args[1])); }
  if (fn == "Union") { want(2); return u.union_of(rec(args[0]), rec(args[1])); }
  if (fn == "Inter") { want(2); return u.intersection(rec(args[0]), rec(args[1])); }
  if (fn == "Diff") { want(2); return u.difference(rec(args[0]), rec(args[1])); }
  parse_fail("unknown class '" + text + "'");
}

RandomVariable resolve_rv(const std::string& name) {
  if (name == "id") return RandomVariable::identity();
  if (name == "pi") return invar_permutation();
  parse_fail("unknown random variable '" + name + "'");
}

namespace {

class GermParser {
public:
  GermParser(const std::string& s, const ClassResolver& r) : s_(s), resolve_(r) {}

  Germ parse() {
    Germ g = expr();
    skip();
    if (pos_ != s_.size()) parse_fail("unexpected '" + s_.substr(pos_) + "' in germ expression");
    return g;
  }

private:
  const std::string& s_;
  const ClassResolver& resolve_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static Germ fold(char op, const Germ& a, const Germ& b) {
    if (a.op() == Germ::Op::Const && b.op() == Germ::Op::Const) {
      const Rational& x = a.constant_value();
      const Rational& y = b.constant_value();
      switch (op) {
      case '+': return Germ::constant(x + y);
      case '-': return Germ::constant(x - y);
      case '*': return Germ::constant(x * y);
      default:
        if (sgn(y) == 0) parse_fail("division by the constant 0");
        return Germ::constant(x / y);
      }
    }
    switch (op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    default: return a / b;
    }
  }

  Germ expr() {
    Germ g = term();
    for (;;) {
      if (eat('+')) g = fold('+', g, term());
      else if (eat('-')) g = fold('-', g, term());
      else return g;
    }
  }
  Germ term() {
    Germ g = factor();
    for (;;) {
      if (eat('*')) g = fold('*', g, factor());
      else if (eat('/')) g = fold('/', g, factor());
      else return g;
    }
  }
  Germ factor() {
    skip();
    if (pos_ >= s_.size()) parse_fail("germ expression ends early");
    if (eat('-')) return fold('-', Germ::constant(Rational(0)), factor());
    if (eat('(')) {
      Germ g = expr();
      if (!eat(')')) parse_fail("missing ')' in germ expression");
      return g;
    }
    if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t b = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Germ::constant(parse_rational(s_.substr(b, pos_ - b)));
    }
    if (s_.compare(pos_, 2, "Pr") != 0) parse_fail("expected Pr(...) at '" + s_.substr(pos_) + "'");
    pos_ += 2;
    RandomVariable rv = RandomVariable::identity();
    skip();
    if (pos_ < s_.size() && s_[pos_] == '[') {
      auto close = s_.find(']', pos_);
      if (close == std::string::npos) parse_fail("missing ']'");
      rv = resolve_rv(trim(s_.substr(pos_ + 1, close - pos_ - 1)));
      pos_ = close + 1;
      skip();
    }
    if (pos_ >= s_.size() || s_[pos_] != '(') parse_fail("expected '(' after Pr");
    auto close = matching(s_, pos_);
    if (close == std::string::npos) parse_fail("unbalanced Pr(...)");
    auto parts = split_top(s_.substr(pos_ + 1, close - pos_ - 1), '|');
    pos_ = close + 1;
    if (parts.size() == 1) return Germ::event(rv, resolve_(parts[0]));
    if (parts.size() == 2) return conditional_germ(rv, resolve_(parts[0]), rv, resolve_(parts[1]));
    parse_fail("Pr(...) takes one condition at most");
  }
};

} // namespace

Germ parse_germ(const std::string& text, const ClassResolver& resolve) { return GermParser(text, resolve).parse(); }

ClassResolver ScenarioContext::resolver() const {
  return [this](const std::string& s) { return resolve_class(universe, s, named); };
}

Universe universe_from_json(const Json& j) {
  check_keys(j, {"mode", "bound", "window"}, "universe");
  const std::string mode = get_or<std::string>(j, "mode", "ordinal");
  Mode m;
  if (mode == "hf") m = Mode::Hf;
  else if (mode == "ordinal") m = Mode::Ordinal;
  else invalid("universe mode must be 'hf' or 'ordinal'");
  return Universe::make(m, get_or<unsigned>(j, "bound", m == Mode::Hf ? 5 : 3),
                        get_or<std::uint64_t>(j, "window", Universe::kDefaultWindow));
}

FilterBase base_from_json(const Universe& u, const Json& j, const ClassResolver& resolve, std::uint64_t seed) {
  check_keys(j, {"builder", "constraints", "level", "pairs", "seed"}, "base");
  const std::string builder = get_or<std::string>(j, "builder", "none");
  std::vector<Constraint> extra;
  if (j.contains("constraints")) {
    if (!j.at("constraints").is_array()) invalid("base constraints must be a list");
    for (const auto& c : j.at("constraints")) {
      if (!c.is_string()) invalid("constraint keys must be strings");
      extra.push_back(parse_constraint(c.get<std::string>(), resolve));
    }
  }
  FilterBase fb;
  if (builder == "none" || builder == "explicit") {
    fb = FilterBase({}, builder);
  } else if (builder == "fineness") {
    fb = fineness_base().with_provenance("fineness");
  } else if (builder == "parametric") {
    fb = FilterBase({Constraint::all_fineness(), Constraint::all_interval(), Constraint::all_weight()}, "parametric");
  } else if (builder == "powerset-stage") {
    const unsigned level = get_or<unsigned>(j, "level", 4);
    auto pairs = level_pairs(u, level, get_or<std::size_t>(j, "pairs", 3), get_or<std::uint64_t>(j, "seed", seed));
    fb = powerset_prefilter_stage(u, level, FilterBase{}, pairs).base;
  } else {
    invalid("unknown base builder '" + builder + "'");
  }
  return extra.empty() ? fb : fb.with(extra);
}

OrderedJson run_query(const ScenarioContext& ctx, const Json& q) {
  OrderedJson r;
  const std::string kind = q.is_object() ? get_or<std::string>(q, "kind", "") : "";
  r["id"] = q.is_object() ? get_or<std::string>(q, "id", "") : "";
  r["kind"] = kind;
  OrderedJson assertions = OrderedJson::array();
  bool pass = true;
  const Universe& u = ctx.universe;
  const auto resolve = ctx.resolver();
  Budget budget;
  budget.seed = ctx.seed;
  try {
    if (kind == "probability") {
      check_keys(q, {"id", "kind", "event", "given", "rv", "snapshot", "samples", "expect"}, "probability query");
      auto rv = resolve_rv(get_or<std::string>(q, "rv", "id"));
      auto a = resolve(require_string(q, "event", "probability query"));
      Germ g = q.contains("given") ? conditional_germ(rv, a, rv, resolve(q.at("given").get<std::string>()))
                                   : Germ::event(rv, a);
      r["germ"] = g.key();
      Json expect = q.value("expect", Json::object());
      check_keys(expect, {"value", "classification"}, "expect");
      if (q.contains("snapshot")) {
        Snapshot t(parse_values(q.at("snapshot")));
        r["snapshot"] = t.code();
        auto v = g.try_eval(t);
        r["value"] = v ? to_string(*v) : "undefined";
        if (expect.contains("value"))
          pass &= expect_eq(assertions, "value", expect.at("value").get<std::string>(), r["value"].get<std::string>());
      }
      OrderedJson samples = OrderedJson::array();
      const auto n = get_or<std::size_t>(q, "samples", 3);
      for (std::size_t i = 0; i < n; ++i) {
        Budget b = budget;
        b.seed = ctx.seed + i;
        // a size floor and a pinned point keep samples away from trivial snapshots
        auto cs = ctx.base.constraints();
        cs.push_back(Constraint::min_size(4 + i));
        if (auto x = u.element_at((ctx.seed + 7 * i) % 64)) cs.push_back(Constraint::fineness(*x));
        auto s = solve_constraints(u, cs, b);
        if (s.status != SolveResult::Status::Found) break;
        OrderedJson x;
        x["snapshot"] = s.witness->code();
        auto v = g.try_eval(*s.witness);
        x["value"] = v ? to_string(*v) : "undefined";
        samples.push_back(std::move(x));
      }
      r["samples"] = samples;
      auto c = classify_infinitesimal(u, g, ctx.base, budget);
      r["classification"] = to_string(c.kind);
      r["classification_rule"] = c.rule;
      if (expect.contains("classification"))
        pass &= expect_eq(assertions, "classification", expect.at("classification").get<std::string>(),
                          to_string(c.kind));
    } else if (kind == "compare" || kind == "much_less") {
      check_keys(q, {"id", "kind", "lhs", "relation", "rhs", "audit", "expect"}, "compare query");
      Germ g1 = parse_germ(require_string(q, "lhs", "compare query"), resolve);
      Germ g2 = parse_germ(require_string(q, "rhs", "compare query"), resolve);
      Verdict v;
      if (kind == "much_less") {
        v = much_less(u, g1, g2, ctx.base, budget);
      } else {
        const std::string rel = get_or<std::string>(q, "relation", "lt");
        Relation rl = rel == "lt" ? Relation::Lt : rel == "le" ? Relation::Le : rel == "eq" ? Relation::Eq
                                                                                             : (invalid("relation must be lt, le or eq"), Relation::Lt);
        v = compare(u, g1, rl, g2, ctx.base, budget);
      }
      r["verdict"] = verdict_json(v);
      if (q.contains("audit") && v.kind == Verdict::Kind::Forced) {
        auto n = q.at("audit").get<std::size_t>();
        auto a = audit_verdict(u, v, n, ctx.seed);
        OrderedJson aj;
        aj["witnesses"] = a.witnesses;
        aj["refutations"] = a.refutations;
        aj["unavailable"] = a.unavailable;
        r["audit"] = aj;
        pass &= a.refutations == 0;
      }
      if (q.contains("expect"))
        pass &= expect_eq(assertions, "verdict", q.at("expect").get<std::string>(), to_string(v.kind));
    } else if (kind == "classify") {
      check_keys(q, {"id", "kind", "germ", "expect"}, "classify query");
      Germ g = parse_germ(require_string(q, "germ", "classify query"), resolve);
      auto c = classify_infinitesimal(u, g, ctx.base, budget);
      r["germ"] = g.key();
      r["classification"] = to_string(c.kind);
      r["rule"] = c.rule;
      r["family"] = keys_of(c.family);
      std::vector<std::string> obs;
      for (const auto& o : c.obligations) obs.push_back(o.text());
      r["obligations"] = obs;
      if (q.contains("expect"))
        pass &= expect_eq(assertions, "classification", q.at("expect").get<std::string>(), to_string(c.kind));
    } else if (kind == "witness") {
      check_keys(q, {"id", "kind", "builder", "pins", "pairs", "k", "l", "m", "lt", "ge", "start", "constraints", "expect"},
                 "witness query");
      const std::string builder = require_string(q, "builder", "witness query");
      auto pins = q.contains("pins") ? parse_values(q.at("pins")) : std::vector<SetValue>{};
      auto pairs = pairs_from(q.value("pairs", Json()), resolve);
      std::vector<Constraint> claimed;
      for (const auto& x : pins) claimed.push_back(Constraint::fineness(x));
      std::optional<Snapshot> f;
      if (builder == "superreg") {
        f = superreg_witness(u, pins, pairs);
        std::uint64_t n = 0;
        for (const auto& p : pairs) n = std::max(n, p.n);
        for (const auto& p : pairs) claimed.push_back(Constraint::ratio(p.a, p.b, n));
      } else if (builder == "ordinal") {
        const auto k = get_or<std::uint64_t>(q, "k", 1), l = get_or<std::uint64_t>(q, "l", 1),
                   m = get_or<std::uint64_t>(q, "m", 1);
        f = ordinal_witness(u, pins, k, l, m, pairs);
        for (const auto& p : pairs) claimed.push_back(Constraint::ratio(p.a, p.b, k));
        if (l) claimed.push_back(Constraint::interval(l));
        if (m) claimed.push_back(Constraint::weight(m));
      } else if (builder == "powerset") {
        std::vector<Constraint> lifted;
        for (const char* key : {"lt", "ge"}) {
          if (!q.contains(key)) continue;
          for (const auto& p : q.at(key)) {
            if (!p.is_array() || p.size() != 2) invalid(std::string(key) + " entries are [A, B] pairs");
            auto a = u.power_class(resolve(p[0].get<std::string>()));
            auto b = u.power_class(resolve(p[1].get<std::string>()));
            lifted.push_back(std::string(key) == "lt" ? Constraint::order_lt(a, b) : Constraint::order_ge(a, b));
          }
        }
        Snapshot start = q.contains("start") ? Snapshot(parse_values(q.at("start"))) : Snapshot(pins);
        f = powerset_witness_extend(u, start, lifted, {});
        claimed.insert(claimed.end(), lifted.begin(), lifted.end());
      } else if (builder == "solve") {
        std::vector<Constraint> cs = ctx.base.constraints();
        if (q.contains("constraints"))
          for (const auto& c : q.at("constraints")) cs.push_back(parse_constraint(c.get<std::string>(), resolve));
        cs.insert(cs.end(), claimed.begin(), claimed.end());
        auto s = solve_constraints(u, cs, budget);
        r["solve_status"] = s.status == SolveResult::Status::Found     ? "Found"
                            : s.status == SolveResult::Status::Refuted ? "Refuted"
                                                                       : "Unknown";
        if (!s.reason.empty()) r["reason"] = s.reason;
        if (s.witness) f = s.witness;
        claimed = instantiate_all(u, cs, budget);
        if (!f) pass = false;
      } else {
        invalid("unknown witness builder '" + builder + "'");
      }
      if (f) {
        r["witness"] = f->code();
        r["size"] = f->size();
        bool all = true;
        r["checks"] = checks_json(*f, claimed, u.mode(), all);
        pass &= all;
      }
    } else if (kind == "fip") {
      check_keys(q, {"id", "kind", "constraints", "expect"}, "fip query");
      FilterBase fb = ctx.base;
      if (q.contains("constraints")) {
        std::vector<Constraint> cs;
        for (const auto& c : q.at("constraints")) cs.push_back(parse_constraint(c.get<std::string>(), resolve));
        fb = FilterBase(cs);
      }
      auto res = check_fip(u, fb, budget);
      r["base"] = keys_of(fb.constraints());
      r["subsets_checked"] = res.subsets_checked;
      OrderedJson ws = OrderedJson::array();
      for (const auto& [keys, snap] : res.witnesses) {
        OrderedJson w;
        w["subset"] = keys;
        w["witness"] = snap.code();
        ws.push_back(std::move(w));
      }
      r["witnesses"] = ws;
      if (!res.subset.empty()) r["subset"] = res.subset;
      if (!res.reason.empty()) r["reason"] = res.reason;
      r["fip"] = to_string(res.status);
      if (q.contains("expect"))
        pass &= expect_eq(assertions, "fip", q.at("expect").get<std::string>(), to_string(res.status));
    } else if (kind == "coherence") {
      check_keys(q, {"id", "kind", "top_size", "t", "s", "event", "per_level"}, "coherence query");
      const auto n = get_or<std::size_t>(q, "top_size", 12);
      auto top = top_window(u, n);
      const Mask full = static_cast<Mask>((std::uint64_t{1} << n) - 1);
      Mask t = mask_from(q.at("t"), n, "t");
      Mask s = q.contains("s") ? mask_from(q.at("s"), n, "s") : full;
      std::vector<Mask> windows{t};
      if (s != full) windows.push_back(s);
      TieredProb tp(top, ctx.tiers, bootstrap_base(top, windows, ctx.tiers), u.mode());
      ClassSpec a = u.empty_class();
      if (q.contains("event") && q.at("event").is_array()) {
        std::vector<SetValue> xs;
        Mask m = mask_from(q.at("event"), n, "event");
        for (std::size_t i = 0; i < n; ++i)
          if ((m >> i) & 1U) xs.push_back(top[i]);
        a = u.explicit_class(xs);
      } else {
        a = resolve(get_or<std::string>(q, "event", "V"));
      }
      auto rep = tp.coherence_check(a, t, s, get_or<std::size_t>(q, "per_level", 6), ctx.seed);
      r["t"] = tp.snapshot_of(t).code();
      r["s"] = tp.snapshot_of(s).code();
      r["event"] = a.name();
      r["checked"] = rep.checked;
      r["failures"] = rep.failures;
      OrderedJson recs = OrderedJson::array();
      for (std::size_t i = 0; i < rep.records.size() && i < 8; ++i) {
        OrderedJson x;
        x["x"] = tp.snapshot_of(rep.records[i].x).code();
        x["lhs"] = to_string(rep.records[i].lhs);
        x["rhs"] = to_string(rep.records[i].rhs);
        recs.push_back(std::move(x));
      }
      r["records"] = recs;
      pass &= rep.passed();
    } else if (kind == "restriction") {
      check_keys(q, {"id", "kind", "top_size", "windows"}, "restriction query");
      const auto n = get_or<std::size_t>(q, "top_size", 16);
      auto top = top_window(u, n);
      std::vector<Mask> windows;
      for (const auto& w : q.at("windows")) windows.push_back(mask_from(w, n, "window"));
      TieredProb tp(top, ctx.tiers, bootstrap_base(top, windows, ctx.tiers), u.mode());
      const auto whole = tp.top_base();
      OrderedJson audits = OrderedJson::array(), chains = OrderedJson::array();
      for (Mask w : windows) {
        auto a = tp.audit(tp.restrict_base(w), ctx.seed);
        OrderedJson x;
        x["window"] = tp.snapshot_of(w).code();
        x["audit"] = audit_json(a);
        pass &= a.all();
        audits.push_back(std::move(x));
        for (Mask t : windows) {
          if (t == w || (t & ~w) != 0) continue;
          auto twice = tp.restrict(tp.restrict_base(w), t);
          auto once = tp.restrict(whole, t);
          bool same = twice.members.size() == once.members.size(), within = same;
          for (std::size_t i = 0; same && i < once.members.size(); ++i)
            same = once.members[i].label == twice.members[i].label && once.members[i].family == twice.members[i].family;
          for (std::size_t i = 0; within && i < once.members.size(); ++i)
            within = (once.members[i].family & twice.members[i].family) == twice.members[i].family;
          // equality is only expected when the chain drops a tier
          const bool strict = tp.tier(t) < tp.tier(w);
          OrderedJson c;
          c["outer"] = tp.snapshot_of(w).code();
          c["inner"] = tp.snapshot_of(t).code();
          c["tier_drop"] = strict;
          c["equal"] = same;
          c["contained"] = within;
          pass &= strict ? same : within;
          chains.push_back(std::move(c));
        }
      }
      r["audits"] = audits;
      r["chains"] = chains;
    } else if (kind == "counterexample") {
      check_keys(q, {"id", "kind"}, "counterexample query");
      auto c = non_restriction_counterexample(ctx.tiers);
      r["top_fip"] = c.top_fip;
      r["restriction_has_empty"] = c.restriction_has_empty;
      r["repaired"] = c.repaired;
      r["small_choice_restricts"] = c.small_choice_restricts;
      r["big_choice_fails"] = c.big_choice_fails;
      r["notes"] = c.notes;
      pass &= c.demonstrated();
    } else if (kind == "demo") {
      check_keys(q, {"id", "kind", "name"}, "demo query");
      auto d = run_demo(require_string(q, "name", "demo query"), ctx.seed);
      pass &= d.value("pass", false);
      r["demo"] = d;
    } else {
      invalid("unknown query kind '" + kind + "'");
    }
    if (!assertions.empty()) r["assertions"] = assertions;
    r["status"] = pass ? "ok" : "failed";
  } catch (const Error& e) {
    OrderedJson err;
    err["code"] = std::string(to_string(e.code()));
    err["message"] = e.what();
    r["status"] = "error";
    r["error"] = err;
  } catch (const Json::exception& e) {
    OrderedJson err;
    err["code"] = "ValidationError";
    err["message"] = e.what();
    r["status"] = "error";
    r["error"] = err;
  }
  return r;
}

OrderedJson run_demo(const std::string& name, std::uint64_t seed) {
  OrderedJson j;
  j["name"] = name;
  const Universe u = Universe::make(Mode::Ordinal, 3);
  const auto id = RandomVariable::identity();
  Budget budget;
  budget.seed = seed;
  auto verdict_entry = [&](const Germ& g1, const Germ& g2) {
    auto v = compare(u, g1, Relation::Lt, g2, fineness_base(), budget);
    auto a = audit_verdict(u, v, 20, seed);
    OrderedJson x;
    x["verdict"] = verdict_json(v);
    x["audit_witnesses"] = a.witnesses;
    x["audit_refutations"] = a.refutations;
    bool ok = v.kind == Verdict::Kind::Forced && a.refutations == 0;
    return std::pair{x, ok};
  };
  if (name == "euclidean") {
    OrderedJson cases = OrderedJson::array();
    bool all = true;
    std::vector<std::pair<ClassSpec, ClassSpec>> pairs{
        {u.limits(), u.even()}, {u.even(), u.ordinals()}, {u.explicit_class({SetValue::natural(0), SetValue::natural(1)}),
                                                           u.explicit_class({SetValue::natural(0), SetValue::natural(1), SetValue::natural(2)})}};
    for (const auto& [a, b] : pairs) {
      auto [x, ok] = verdict_entry(Germ::event(id, a), Germ::event(id, b));
      all &= ok;
      cases.push_back(x);
    }
    j["cases"] = cases;
    j["pass"] = all;
  } else if (name == "hume-failure") {
    auto pe = image_class(u, invar_permutation(), u.even());
    auto [x, ok] = verdict_entry(Germ::event(id, pe), Germ::event(id, u.even()));
    j["image"] = pe.name();
    j["result"] = x;
    // The shift moves 0 out of the image: one fewer member on every snapshot holding 0.
    Snapshot t{SetValue::natural(0), SetValue::natural(1), SetValue::natural(2), SetValue::natural(3)};
    j["snapshot"] = t.code();
    j["lhs"] = to_string(Germ::event(id, pe).eval(t));
    j["rhs"] = to_string(Germ::event(id, u.even()).eval(t));
    j["pass"] = ok;
  } else if (name == "translation-failure") {
    auto omega = u.below(SetValue::ordinal(1, 0));
    auto shifted = translate_class(u, omega, SetValue::natural(1));
    auto [x, ok] = verdict_entry(Germ::event(id, shifted), Germ::event(id, omega));
    j["shifted"] = shifted.name();
    j["result"] = x;
    j["pass"] = ok;
  } else if (name == "powerset-chain") {
    auto c = chain_json(u, 1);
    j["chain"] = c;
    j["pass"] = c["pass"];
  } else if (name == "pn-iteration") {
    OrderedJson chains = OrderedJson::array();
    bool all = true;
    for (unsigned n = 1; n <= 3; ++n) {
      auto c = chain_json(u, n);
      all &= c["pass"].get<bool>();
      chains.push_back(c);
    }
    const Universe hf = Universe::make(Mode::Hf, 5);
    auto st = powerset_prefilter_stage(hf, 4, FilterBase{}, level_pairs(hf, 4, 3, seed));
    auto fip = check_fip(hf, st.base, budget);
    j["chains"] = chains;
    j["stage_choices"] = st.choices;
    j["stage_base"] = keys_of(st.base.constraints());
    j["stage_fip"] = to_string(fip.status);
    j["pass"] = all && fip.status == FipResult::Status::Witnessed;
  } else {
    invalid("unknown demo '" + name + "'");
  }
  return j;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string field(const OrderedJson& r, const char* key) {
  if (!r.contains(key)) return {};
  const auto& v = r.at(key);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

} // namespace

std::string ScenarioReport::render(const std::string& format) const {
  if (format == "json") return json.dump(2) + "\n";
  if (format != "csv") invalid("output format must be json or csv");
  std::ostringstream os;
  os << "id,kind,status,value,verdict,rule,witness\n";
  if (json.contains("results"))
    for (const auto& r : json.at("results")) {
      std::string verdict, rule;
      if (r.contains("verdict")) {
        verdict = field(r.at("verdict"), "kind");
        rule = field(r.at("verdict"), "rule");
      } else if (r.contains("classification")) {
        verdict = field(r, "classification");
        rule = field(r, r.contains("rule") ? "rule" : "classification_rule");
      } else if (r.contains("fip")) {
        verdict = field(r, "fip");
      }
      os << csv_cell(field(r, "id")) << ',' << csv_cell(field(r, "kind")) << ',' << csv_cell(field(r, "status"))
         << ',' << csv_cell(field(r, "value")) << ',' << csv_cell(verdict) << ',' << csv_cell(rule) << ','
         << csv_cell(field(r, "witness")) << '\n';
    }
  return os.str();
}

ScenarioReport run_scenario(const Json& doc, std::optional<bool> parallel) {
  ScenarioReport rep;
  try {
    check_keys(doc, {"universe", "seed", "tiers", "classes", "base", "queries", "output", "parallel"}, "scenario");
    Json output = doc.value("output", Json::object());
    check_keys(output, {"format", "timing"}, "output");
    const std::string format = get_or<std::string>(output, "format", "json");
    if (format != "json" && format != "csv") invalid("output format must be json or csv");
    const bool timing = get_or<bool>(output, "timing", false);

    ScenarioContext ctx{universe_from_json(doc.value("universe", Json::object())), FilterBase{},
                        get_or<std::uint64_t>(doc, "seed", 0), TierConfig{{5, 9, 13, 17}}, {}};
    if (doc.contains("tiers")) {
      ctx.tiers.thresholds = doc.at("tiers").get<std::vector<std::size_t>>();
      ctx.tiers.validate();
    }
    if (doc.contains("classes")) {
      const auto& cl = doc.at("classes");
      if (!cl.is_object()) invalid("classes must map names to class expressions");
      for (auto it = cl.begin(); it != cl.end(); ++it) {
        // Named classes may refer to earlier ones (in key order).
        auto c = resolve_class(ctx.universe, it.value().get<std::string>(), ctx.named);
        ctx.named.emplace(it.key(), c.with_name(it.key()));
      }
    }
    ctx.base = base_from_json(ctx.universe, doc.value("base", Json::object()), ctx.resolver(), ctx.seed);
    const Json queries = doc.value("queries", Json::array());
    if (!queries.is_array()) invalid("queries must be a list");
    const bool par = parallel.value_or(get_or<bool>(doc, "parallel", false));

    rep.json["universe"] = {{"mode", to_string(ctx.universe.mode())}, {"bound", ctx.universe.bound()}};
    rep.json["seed"] = ctx.seed;
    rep.json["base"] = keys_of(ctx.base.constraints());
    std::vector<OrderedJson> results(queries.size());
    auto one = [&](std::size_t i) {
      auto t0 = std::chrono::steady_clock::now();
      auto r = run_query(ctx, queries[i]);
      if (timing)
        r["elapsed_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      return r;
    };
    if (par) {
      std::vector<std::future<OrderedJson>> fs;
      for (std::size_t i = 0; i < queries.size(); ++i) fs.push_back(std::async(std::launch::async, one, i));
      for (std::size_t i = 0; i < fs.size(); ++i) results[i] = fs[i].get();
    } else {
      for (std::size_t i = 0; i < queries.size(); ++i) results[i] = one(i);
    }
    std::size_t ok = 0, failed = 0, errors = 0;
    for (const auto& r : results) {
      const auto s = r.at("status").get<std::string>();
      ok += s == "ok";
      failed += s == "failed";
      errors += s == "error";
    }
    rep.json["results"] = results;
    rep.json["summary"] = {{"queries", results.size()}, {"ok", ok}, {"failed", failed}, {"errors", errors}};
    rep.format = format;
    rep.exit_code = failed + errors > 0 ? 1 : 0;
  } catch (const Error& e) {
    rep.json = OrderedJson{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    rep.exit_code = e.code() == ErrorCode::ParseError || e.code() == ErrorCode::ValidationError ||
                            e.code() == ErrorCode::BoundTooSmall || e.code() == ErrorCode::BoundTooLarge ||
                            e.code() == ErrorCode::WrongMode
                        ? 2
                        : 3;
  } catch (const Json::exception& e) {
    rep.json = OrderedJson{{"error", {{"code", "ValidationError"}, {"message", e.what()}}}};
    rep.exit_code = 2;
  } catch (const std::exception& e) {
    rep.json = OrderedJson{{"error", {{"code", "Internal"}, {"message", e.what()}}}};
    rep.exit_code = 3;
  }
  return rep;
}

ScenarioReport run_scenario_file(const std::string& path, std::optional<bool> parallel) {
  std::ifstream in(path);
  if (!in) {
    ScenarioReport rep;
    rep.json = OrderedJson{{"error", {{"code", "ValidationError"}, {"message", "cannot open " + path}}}};
    rep.exit_code = 2;
    return rep;
  }
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    ScenarioReport rep;
    rep.json = OrderedJson{{"error", {{"code", "ParseError"}, {"message", e.what()}}}};
    rep.exit_code = 2;
    return rep;
  }
  return run_scenario(doc, parallel);
}

} // namespace nap
