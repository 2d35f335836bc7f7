#include "nap/verdict.hpp"

#include <random>

#include "nap/error.hpp"

namespace nap {

std::string to_string(Relation r) {
  switch (r) {
  case Relation::Lt: return "<";
  case Relation::Le: return "<=";
  case Relation::Eq: return "=";
  }
  return "?";
}

bool relation_holds(const Rational& a, Relation r, const Rational& b) {
  switch (r) {
  case Relation::Lt: return a < b;
  case Relation::Le: return a <= b;
  case Relation::Eq: return a == b;
  }
  return false;
}

std::string Obligation::text() const {
  std::string s = lhs.key() + " " + to_string(rel) + " " + rhs.key() + " on";
  if (cited.empty()) return s + " every snapshot";
  for (std::size_t i = 0; i < cited.size(); ++i) s += (i ? ", " : " ") + cited[i].key();
  return s;
}

std::string to_string(Verdict::Kind k) {
  switch (k) {
  case Verdict::Kind::Forced: return "Forced";
  case Verdict::Kind::ForcedNot: return "ForcedNot";
  case Verdict::Kind::Undetermined: return "Undetermined";
  }
  return "?";
}

std::string to_string(Infinitesimal i) {
  switch (i) {
  case Infinitesimal::ApproxZero: return "ApproxZero";
  case Infinitesimal::NotApproxZero: return "NotApproxZero";
  case Infinitesimal::Undetermined: return "Undetermined";
  }
  return "?";
}

namespace {

using K = Constraint::Kind;

// Pointwise relation of g1 to g2 established by a rule.
enum class Known { Lt, Le, Eq, Gt, Ge };

struct Finding {
  Known rel;
  std::string rule;
  std::vector<Constraint> cited;
};

bool is_identity(const RandomVariable& rv) { return rv.kind() == RandomVariable::Kind::Identity; }

bool identity_event(const Germ& g) { return g.op() == Germ::Op::Event && is_identity(g.rv()); }

// Pr(id in A | id in D) as Joint(A, D) / Event(D).
std::optional<std::pair<ClassSpec, ClassSpec>> identity_conditional(const Germ& g) {
  if (g.op() != Germ::Op::Div) return std::nullopt;
  const Germ& j = g.lhs();
  const Germ& e = g.rhs();
  if (j.op() != Germ::Op::Joint || !identity_event(e)) return std::nullopt;
  if (!is_identity(j.rv()) || !is_identity(j.rv2())) return std::nullopt;
  if (j.cls2().name() != e.cls().name()) return std::nullopt;
  return std::make_pair(j.cls(), j.cls2());
}

std::optional<Constraint> fineness_for(const FilterBase& fb, const SetValue& x) {
  if (const Constraint* c = fb.find("Fineness(" + x.code() + ")")) return *c;
  if (const Constraint* c = fb.find("Fineness(*)")) return c->instantiate_point(x);
  return std::nullopt;
}

bool has_family(const FilterBase& fb, K family) {
  for (const auto& c : fb.constraints())
    if (c.is_parametric() && c.family() == family && family != K::Ratio) return true;
  return false;
}

std::optional<Constraint> ratio_family(const FilterBase& fb, const std::string& a, const std::string& b) {
  if (const Constraint* c = fb.find("Ratio(" + a + "," + b + ",*)")) return *c;
  return std::nullopt;
}

// Strongest member of a family of kind `kind` (parameter k): explicit members
// or the parametric family instantiated at `want`.
std::optional<Constraint> strongest(const FilterBase& fb, K kind, std::uint64_t want,
                                    const std::function<bool(const Constraint&)>& matches) {
  std::optional<Constraint> best;
  for (const auto& c : fb.constraints()) {
    if (c.is_parametric()) {
      if (c.family() == kind && matches(c)) return c.instantiate(std::max<std::uint64_t>(want, 1));
      continue;
    }
    if (c.kind() == kind && matches(c) && (!best || c.param() > best->param())) best = c;
  }
  return best;
}

// Smallest k with 1/k < c (strict) or 1/k <= c; 0 when c <= 0.
std::uint64_t needed_k(const Rational& c, bool strict) {
  if (sgn(c) <= 0) return 0;
  Rational inv = 1 / c;
  mpz_class fl = inv.get_num() / inv.get_den();
  mpz_class k = strict ? fl + 1 : (fl * inv.get_den() == inv.get_num() ? fl : fl + 1);
  if (k < 1) k = 1;
  if (!k.fits_ulong_p()) return 0;
  return k.get_ui();
}

// Bound b on g vs Const(c): b < c gives Lt, b == c gives Le.
std::optional<Known> against_const(const Rational& bound, const Rational& c) {
  if (bound < c) return Known::Lt;
  if (bound == c) return Known::Le;
  return std::nullopt;
}

std::optional<Finding> derive(const Universe& u, const Germ& g1, const Germ& g2, const FilterBase& fb) {
  if (structurally_equal(g1, g2)) return Finding{Known::Eq, "structural", {}};

  // R1 and monotonicity: same diagonal variable, A included in B.
  if (g1.op() == Germ::Op::Event && g2.op() == Germ::Op::Event && g1.rv().name() == g2.rv().name() &&
      g1.rv().is_diagonal()) {
    const ClassSpec& a = g1.cls();
    const ClassSpec& b = g2.cls();
    if (class_included(u, a, b)) {
      if (auto x = find_separator(b, a)) {
        if (auto pre = g1.rv().preimage(*x))
          if (auto f = fineness_for(fb, *pre)) return Finding{Known::Lt, "R1", {*f}};
      }
      // Counting alone gives <= at every snapshot.
      if (!identity_event(g1)) return Finding{Known::Le, "monotone", {}};
    }
  }

  if (identity_event(g1) && identity_event(g2)) {
    const std::string a = g1.cls().name(), b = g2.cls().name();
    if (const Constraint* c = fb.find("OrderLt(" + a + "," + b + ")")) return Finding{Known::Lt, "R3", {*c}};
    if (const Constraint* c = fb.find("OrderGe(" + a + "," + b + ")")) return Finding{Known::Ge, "R3", {*c}};
    if (const Constraint* c = fb.find("OrderLt(" + b + "," + a + ")")) return Finding{Known::Gt, "R3", {*c}};
    if (const Constraint* c = fb.find("OrderGe(" + b + "," + a + ")")) return Finding{Known::Le, "R3", {*c}};
    auto rc = strongest(fb, K::Ratio, 2, [&](const Constraint& c) { return c.a().name() == a && c.b().name() == b; });
    if (rc) return Finding{rc->param() >= 2 ? Known::Lt : Known::Le, "R2", {*rc}};
    if (class_included(u, g1.cls(), g2.cls())) return Finding{Known::Le, "monotone", {}};
  }

  if (g2.op() == Germ::Op::Const) {
    const Rational& c = g2.constant_value();
    // R2: Pr(A)/Pr(B) <= 1/k.
    if (g1.op() == Germ::Op::Div && identity_event(g1.lhs()) && identity_event(g1.rhs())) {
      const std::string a = g1.lhs().cls().name(), b = g1.rhs().cls().name();
      auto rc = strongest(fb, K::Ratio, needed_k(c, true),
                          [&](const Constraint& x) { return x.a().name() == a && x.b().name() == b; });
      if (rc)
        if (auto k = against_const(Rational(1, rc->param()), c)) return Finding{*k, "R2", {*rc}};
    }
    // R4: Pr(On) <= 1/m.
    if (identity_event(g1) && g1.cls().name() == "On") {
      auto wc = strongest(fb, K::Weight, needed_k(c, true), [](const Constraint&) { return true; });
      if (wc)
        if (auto k = against_const(Rational(1, wc->param()), c)) return Finding{*k, "R4", {*wc}};
    }
    // R5: Pr(Lim | On) and |Pr(Even | On) - Pr(Odd | On)| are at most 1/(l+1).
    bool interval_pattern = false;
    if (auto cond = identity_conditional(g1))
      interval_pattern = cond->first.name() == "Lim" && cond->second.name() == "On";
    if (g1.op() == Germ::Op::Sub) {
      auto x = identity_conditional(g1.lhs()), y = identity_conditional(g1.rhs());
      if (x && y && x->second.name() == "On" && y->second.name() == "On") {
        auto p = x->first.name(), q = y->first.name();
        interval_pattern = (p == "Even" && q == "Odd") || (p == "Odd" && q == "Even");
      }
    }
    if (interval_pattern) {
      std::uint64_t want = needed_k(c, true);
      auto ic = strongest(fb, K::Interval, want > 1 ? want - 1 : 1, [](const Constraint&) { return true; });
      auto f0 = fineness_for(fb, SetValue::natural(0));
      if (ic && f0)
        if (auto k = against_const(Rational(1, ic->param() + 1), c)) return Finding{*k, "R5", {*ic, *f0}};
    }
  }
  return std::nullopt;
}

Known flip(Known k) {
  switch (k) {
  case Known::Lt: return Known::Gt;
  case Known::Le: return Known::Ge;
  case Known::Eq: return Known::Eq;
  case Known::Gt: return Known::Lt;
  case Known::Ge: return Known::Le;
  }
  return k;
}

Obligation obligation_for(const Germ& g1, Known k, const Germ& g2, std::vector<Constraint> cited) {
  switch (k) {
  case Known::Lt: return {g1, Relation::Lt, g2, std::move(cited)};
  case Known::Le: return {g1, Relation::Le, g2, std::move(cited)};
  case Known::Eq: return {g1, Relation::Eq, g2, std::move(cited)};
  case Known::Gt: return {g2, Relation::Lt, g1, std::move(cited)};
  case Known::Ge: return {g2, Relation::Le, g1, std::move(cited)};
  }
  return {g1, Relation::Eq, g2, std::move(cited)};
}

// +1 Forced, -1 ForcedNot, 0 undecided.
int decide(Relation asked, Known k) {
  switch (asked) {
  case Relation::Lt:
    if (k == Known::Lt) return 1;
    if (k == Known::Ge || k == Known::Gt || k == Known::Eq) return -1;
    return 0;
  case Relation::Le:
    if (k == Known::Lt || k == Known::Le || k == Known::Eq) return 1;
    if (k == Known::Gt) return -1;
    return 0;
  case Relation::Eq:
    if (k == Known::Eq) return 1;
    if (k == Known::Lt || k == Known::Gt) return -1;
    return 0;
  }
  return 0;
}

std::vector<Evidence> sample_evidence(const Universe& u, const Germ& g1, const Germ& g2, const FilterBase& fb,
                                      const Budget& budget) {
  std::vector<Evidence> out;
  std::mt19937_64 rng(budget.seed);
  for (std::size_t i = 0; i < budget.samples; ++i) {
    Budget b = budget;
    b.seed = budget.seed + i;
    std::vector<Constraint> cs = fb.constraints();
    std::uint64_t range = 64;
    if (auto n = u.size()) range = std::min<std::uint64_t>(range, *n);
    if (auto x = u.element_at(rng() % range)) cs.push_back(Constraint::fineness(*x));
    auto r = solve_constraints(u, cs, b);
    if (r.status != SolveResult::Status::Found) continue;
    out.push_back({*r.witness, g1.try_eval(*r.witness), g2.try_eval(*r.witness)});
  }
  return out;
}

} // namespace

Verdict compare(const Universe& u, const Germ& g1, Relation rel, const Germ& g2, const FilterBase& fb,
                const Budget& budget) {
  Verdict v;
  v.claim = g1.key() + " " + to_string(rel) + " " + g2.key();
  std::optional<Finding> f = derive(u, g1, g2, fb);
  if (!f) {
    if (auto r = derive(u, g2, g1, fb)) {
      r->rel = flip(r->rel);
      f = r;
    }
  }
  if (f) {
    int d = decide(rel, f->rel);
    if (d != 0) {
      v.kind = d > 0 ? Verdict::Kind::Forced : Verdict::Kind::ForcedNot;
      v.rule = f->rule;
      v.cited = f->cited;
      v.obligations.push_back(obligation_for(g1, f->rel, g2, f->cited));
      return v;
    }
    v.diagnostic = "rule " + f->rule + " gives a weaker relation than asked";
  }
  v.kind = Verdict::Kind::Undetermined;
  v.rule = "none";
  v.evidence = sample_evidence(u, g1, g2, fb, budget);
  return v;
}

Classification classify_infinitesimal(const Universe& u, const Germ& g, const FilterBase& fb,
                                      const Budget& budget) {
  Classification out;
  std::vector<std::uint64_t> levels = {2, 3, std::max<std::uint64_t>(budget.parametric_value, 4)};
  auto bound_obligations = [&](const Germ& x, K family, bool with_zero) {
    for (auto n : levels) {
      std::vector<Constraint> cited;
      for (const auto& c : fb.constraints())
        if (c.is_parametric() && c.family() == family) cited.push_back(c.instantiate(n));
      if (with_zero) cited.push_back(Constraint::fineness(SetValue::natural(0)));
      out.obligations.push_back({x, Relation::Le, Germ::constant(Rational(1, n)), cited});
    }
  };
  auto family = [&](K k) {
    for (const auto& c : fb.constraints())
      if (c.is_parametric() && c.family() == k) out.family.push_back(c);
  };

  if (g.op() == Germ::Op::Const) {
    out.kind = sgn(g.constant_value()) == 0 ? Infinitesimal::ApproxZero : Infinitesimal::NotApproxZero;
    out.rule = "constant";
    return out;
  }
  if (g.op() == Germ::Op::Div && structurally_equal(g.lhs(), g.rhs())) {
    out.kind = Infinitesimal::NotApproxZero;
    out.rule = "self-ratio";
    return out;
  }
  if (g.op() == Germ::Op::Event && g.cls().name() == "V") {
    out.kind = Infinitesimal::NotApproxZero;
    out.rule = "total";
    return out;
  }
  if (identity_event(g) && g.cls().name() == "On" && has_family(fb, K::Weight)) {
    out.kind = Infinitesimal::ApproxZero;
    out.rule = "R6/weight";
    family(K::Weight);
    bound_obligations(g, K::Weight, false);
    return out;
  }
  const bool fine = fb.find("Fineness(*)") != nullptr;
  if (has_family(fb, K::Interval) && fine) {
    if (auto cond = identity_conditional(g); cond && cond->first.name() == "Lim" && cond->second.name() == "On") {
      out.kind = Infinitesimal::ApproxZero;
      out.rule = "R6/interval";
      family(K::Interval);
      bound_obligations(g, K::Interval, true);
      return out;
    }
    if (g.op() == Germ::Op::Sub) {
      auto x = identity_conditional(g.lhs()), y = identity_conditional(g.rhs());
      if (x && y && x->second.name() == "On" && y->second.name() == "On" &&
          ((x->first.name() == "Even" && y->first.name() == "Odd") ||
           (x->first.name() == "Odd" && y->first.name() == "Even"))) {
        out.kind = Infinitesimal::ApproxZero;
        out.rule = "R6/interval";
        family(K::Interval);
        bound_obligations(g, K::Interval, true);
        bound_obligations(Germ::constant(0) - g, K::Interval, true);
        return out;
      }
    }
  }
  if (g.op() == Germ::Op::Event && g.rv().is_diagonal() && fine && u.mode() == Mode::Ordinal &&
      g.cls().tier().kind() == CardinalityTier::Kind::Finite) {
    out.kind = Infinitesimal::ApproxZero;
    out.rule = "R6/fineness";
    family(K::Fineness);
    const std::uint64_t size = std::max<std::uint64_t>(g.cls().tier().value(), 1);
    for (auto n : levels) {
      std::vector<Constraint> cited;
      for (std::uint64_t i = 0; cited.size() < n * size + 1; ++i)
        if (auto x = u.element_at(i)) cited.push_back(Constraint::fineness(*x));
      out.obligations.push_back({g, Relation::Lt, Germ::constant(Rational(1, n)), cited});
    }
    return out;
  }
  if (g.op() == Germ::Op::Div && identity_event(g.lhs()) && identity_event(g.rhs())) {
    if (auto rf = ratio_family(fb, g.lhs().cls().name(), g.rhs().cls().name())) {
      out.kind = Infinitesimal::ApproxZero;
      out.rule = "R6/ratio";
      out.family.push_back(*rf);
      for (auto n : levels)
        out.obligations.push_back({g, Relation::Le, Germ::constant(Rational(1, n)), {rf->instantiate(n)}});
      return out;
    }
  }
  out.rule = "none";
  return out;
}

Verdict much_less(const Universe& u, const Germ& g1, const Germ& g2, const FilterBase& fb, const Budget& budget) {
  Verdict v;
  v.claim = g1.key() + " << " + g2.key();
  if (structurally_equal(g1, g2)) {
    v.kind = Verdict::Kind::ForcedNot;
    v.rule = "structural";
    v.obligations.push_back({g1, Relation::Eq, g2, {}});
    return v;
  }
  auto c = classify_infinitesimal(u, g1 / g2, fb, budget);
  v.rule = c.rule;
  v.cited = c.family;
  v.obligations = c.obligations;
  switch (c.kind) {
  case Infinitesimal::ApproxZero: v.kind = Verdict::Kind::Forced; break;
  case Infinitesimal::NotApproxZero: v.kind = Verdict::Kind::ForcedNot; break;
  case Infinitesimal::Undetermined:
    v.kind = Verdict::Kind::Undetermined;
    v.evidence = sample_evidence(u, g1, g2, fb, budget);
    break;
  }
  return v;
}

AuditResult audit_obligation(const Universe& u, const Obligation& ob, std::size_t count, std::uint64_t seed) {
  AuditResult out;
  std::mt19937_64 rng(seed);
  std::uint64_t range = 256;
  if (auto n = u.size()) range = std::min<std::uint64_t>(range, *n);
  for (std::size_t attempt = 0; out.witnesses < count && attempt < 3 * count; ++attempt) {
    std::vector<Constraint> cs = ob.cited;
    const std::size_t extra = rng() % 4;
    for (std::size_t i = 0; i < extra; ++i)
      if (auto x = u.element_at(rng() % range)) cs.push_back(Constraint::fineness(*x));
    if (cs.empty())
      if (auto x = u.element_at(rng() % range)) cs.push_back(Constraint::fineness(*x));
    Budget b;
    b.seed = seed + attempt;
    auto r = solve_constraints(u, cs, b);
    if (r.status != SolveResult::Status::Found) {
      ++out.unavailable;
      continue;
    }
    ++out.witnesses;
    const Snapshot& t = *r.witness;
    auto x = ob.lhs.try_eval(t), y = ob.rhs.try_eval(t);
    if (!x || !y || !relation_holds(*x, ob.rel, *y)) {
      ++out.refutations;
      if (out.failures.size() < 5) out.failures.push_back(ob.text() + " fails on " + t.code());
    }
  }
  return out;
}

AuditResult audit_verdict(const Universe& u, const Verdict& v, std::size_t count, std::uint64_t seed) {
  AuditResult total;
  for (std::size_t i = 0; i < v.obligations.size(); ++i) {
    auto r = audit_obligation(u, v.obligations[i], count, seed + 7919 * i);
    total.witnesses = i == 0 ? r.witnesses : std::min(total.witnesses, r.witnesses);
    total.refutations += r.refutations;
    total.unavailable += r.unavailable;
    total.failures.insert(total.failures.end(), r.failures.begin(), r.failures.end());
  }
  if (v.obligations.empty()) total.witnesses = count;
  return total;
}

} // namespace nap
