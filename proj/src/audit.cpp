#include "nap/audit.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "nap/bootstrap.hpp"
#include "nap/error.hpp"
#include "nap/filter_base.hpp"
#include "nap/witness.hpp"

namespace nap {

std::string CriterionResult::line() const {
  std::ostringstream os;
  os << (pass ? "PASS " : "FAIL ") << id << ' ' << name << ": " << detail;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << " [" << seconds << "s]";
  return os.str();
}

void VerdictLog::add(int criterion, const Universe& u, const Verdict& v) {
  if (v.kind == Verdict::Kind::Forced) entries.push_back({criterion, u, v});
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t scaled(const AuditOptions& o, std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * o.budget)));
}

std::uint64_t below_n(std::mt19937_64& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

std::uint64_t pool_size(const Universe& u, std::uint64_t cap) {
  auto s = u.size();
  return s ? std::min(*s, cap) : cap;
}

std::vector<SetValue> random_values(const Universe& u, std::mt19937_64& rng, std::size_t n, std::uint64_t cap) {
  std::vector<SetValue> out;
  const auto pool = pool_size(u, cap);
  for (std::size_t tries = 0; out.size() < n && tries < 50 * n + 50; ++tries) {
    auto x = *u.element_at(below_n(rng, pool));
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

Snapshot random_snapshot(const Universe& u, std::mt19937_64& rng, std::vector<SetValue> must = {}) {
  auto extra = random_values(u, rng, 1 + below_n(rng, 12), 160);
  must.insert(must.end(), extra.begin(), extra.end());
  return Snapshot(std::move(must));
}

Verdict as_verdict(const Classification& c, const Germ& g) {
  Verdict v;
  v.kind = c.kind == Infinitesimal::ApproxZero ? Verdict::Kind::Forced : Verdict::Kind::Undetermined;
  v.rule = c.rule;
  v.claim = g.key() + " ~ 0";
  v.cited = c.family;
  v.obligations = c.obligations;
  return v;
}

// Expression trees evaluated twice: as germs, and directly from counts.
struct Expr {
  enum class K { Const, Event, Add, Sub, Mul, Div } k;
  Rational q;
  std::optional<ClassSpec> a;
  std::shared_ptr<Expr> l, r;
};
using ExprP = std::shared_ptr<Expr>;

std::optional<Rational> oracle(const ExprP& e, const Snapshot& t) {
  switch (e->k) {
  case Expr::K::Const: return e->q;
  case Expr::K::Event: {
    if (t.empty()) return std::nullopt;
    std::size_t n = 0;
    for (const auto& s : t.states()) n += e->a->contains(s) ? 1 : 0;
    return count_ratio(n, t.size());
  }
  default: break;
  }
  auto x = oracle(e->l, t), y = oracle(e->r, t);
  if (!x || !y) return std::nullopt;
  switch (e->k) {
  case Expr::K::Add: return Rational(*x + *y);
  case Expr::K::Sub: return Rational(*x - *y);
  case Expr::K::Mul: return Rational(*x * *y);
  default: break;
  }
  if (sgn(*y) == 0) return std::nullopt;
  return Rational(*x / *y);
}

Germ to_germ(const ExprP& e) {
  switch (e->k) {
  case Expr::K::Const: return Germ::constant(e->q);
  case Expr::K::Event: return Germ::event(RandomVariable::identity(), *e->a);
  case Expr::K::Add: return to_germ(e->l) + to_germ(e->r);
  case Expr::K::Sub: return to_germ(e->l) - to_germ(e->r);
  case Expr::K::Mul: return to_germ(e->l) * to_germ(e->r);
  case Expr::K::Div: return to_germ(e->l) / to_germ(e->r);
  }
  throw Error(ErrorCode::ValidationError, "bad expression");
}

std::vector<ClassSpec> class_pool(const Universe& u, std::mt19937_64& rng) {
  std::vector<ClassSpec> pool;
  if (u.mode() == Mode::Ordinal) {
    pool = {u.ordinals(), u.even(), u.odd(), u.limits(), u.successors(), u.atoms(), u.non_ordinals(),
            u.below(SetValue::ordinal(1, 2))};
  } else {
    for (unsigned a = 0; a + 1 < u.bound(); ++a) pool.push_back(u.rank_level(a));
    auto x = random_values(u, rng, 1, 64);
    if (!x.empty() && x[0].kind() == ValueKind::Set) pool.push_back(u.members_of(x[0]));
  }
  pool.push_back(u.everything());
  auto e = u.explicit_class(random_values(u, rng, 1 + below_n(rng, 10), 64));
  pool.push_back(e);
  pool.push_back(u.complement(e));
  return pool;
}

ExprP random_expr(const std::vector<ClassSpec>& pool, std::mt19937_64& rng, int depth) {
  auto e = std::make_shared<Expr>();
  if (depth == 0 || below_n(rng, 4) == 0) {
    if (below_n(rng, 3) == 0) {
      e->k = Expr::K::Const;
      e->q = make_rational(static_cast<std::int64_t>(below_n(rng, 7)) - 3, 1 + static_cast<std::int64_t>(below_n(rng, 5)));
    } else {
      e->k = Expr::K::Event;
      e->a = pool[below_n(rng, pool.size())];
    }
    return e;
  }
  e->k = static_cast<Expr::K>(2 + below_n(rng, 4));
  e->l = random_expr(pool, rng, depth - 1);
  e->r = random_expr(pool, rng, depth - 1);
  return e;
}

} // namespace

CriterionResult criterion_field_laws(const AuditOptions& o, VerdictLog&) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 1);
  const Universe hf = Universe::make(Mode::Hf, 5);
  const Universe ord = Universe::make(Mode::Ordinal, 3);
  const std::size_t cases = scaled(o, 1000);
  std::size_t mismatches = 0, points = 0;
  std::string first;
  auto miss = [&](const std::string& what) {
    if (mismatches++ == 0) first = what;
  };
  for (std::size_t i = 0; i < cases; ++i) {
    const Universe& u = i % 2 ? ord : hf;
    const auto id = RandomVariable::identity();
    if (i % 4 < 2) {
      // Disjoint pair: split a random explicit set, or a builtin pair.
      ClassSpec a = u.empty_class(), b = u.empty_class();
      if (u.mode() == Mode::Ordinal && below_n(rng, 2) == 0) {
        std::vector<std::pair<ClassSpec, ClassSpec>> builtin{
            {u.even(), u.odd()}, {u.limits(), u.successors()}, {u.atoms(), u.ordinals()}};
        std::tie(a, b) = builtin[below_n(rng, builtin.size())];
      } else if (u.mode() == Mode::Hf && below_n(rng, 2) == 0) {
        unsigned x = static_cast<unsigned>(below_n(rng, 4)), y = static_cast<unsigned>(below_n(rng, 4));
        if (x == y) y = (x + 1) % 4;
        a = u.rank_level(x);
        b = u.rank_level(y);
      } else {
        auto xs = random_values(u, rng, 2 + below_n(rng, 12), 96);
        std::vector<SetValue> l, r;
        for (const auto& x : xs) (below_n(rng, 2) ? l : r).push_back(x);
        a = u.explicit_class(l);
        b = below_n(rng, 3) == 0 ? u.complement(a) : u.explicit_class(r);
      }
      Germ ga = Germ::event(id, a), gb = Germ::event(id, b), gu = Germ::event(id, u.union_of(a, b));
      for (int s = 0; s < 5; ++s) {
        auto t = random_snapshot(u, rng);
        ++points;
        std::size_t n = 0;
        for (const auto& x : t.states()) n += a.contains(x) || b.contains(x) ? 1 : 0;
        Rational direct = count_ratio(n, t.size());
        if (gu.eval(t) != direct || (ga + gb).eval(t) != direct) miss("additivity at " + t.code());
        if (Germ::event(id, u.everything()).eval(t) != 1 || Germ::event(id, u.empty_class()).eval(t) != 0)
          miss("normalization at " + t.code());
      }
    } else {
      auto pool = class_pool(u, rng);
      auto x = random_expr(pool, rng, 3), y = random_expr(pool, rng, 2), z = random_expr(pool, rng, 2);
      Germ a = to_germ(x), b = to_germ(y), c = to_germ(z);
      for (int s = 0; s < 5; ++s) {
        auto t = random_snapshot(u, rng);
        ++points;
        if (a.try_eval(t) != oracle(x, t)) miss("tree " + a.key() + " at " + t.code());
        auto eq = [&](const Germ& p, const Germ& q, const char* law) {
          if (p.try_eval(t) != q.try_eval(t)) miss(std::string(law) + " at " + t.code());
        };
        eq(a + b, b + a, "commutativity of +");
        eq(a * b, b * a, "commutativity of *");
        eq((a + b) + c, a + (b + c), "associativity of +");
        eq((a * b) * c, a * (b * c), "associativity of *");
        eq(a * (b + c), a * b + a * c, "distributivity");
        auto av = a.try_eval(t);
        if (av) {
          if ((a - a).try_eval(t) != Rational(0)) miss("additive inverse at " + t.code());
          auto bv = b.try_eval(t);
          if (bv && sgn(*bv) != 0 && ((a / b) * b).try_eval(t) != av) miss("division at " + t.code());
        }
      }
    }
  }
  CriterionResult r{1, "field-laws", false, "", since(t0)};
  r.pass = mismatches == 0 && cases >= 1000 && r.seconds < 10.0;
  r.detail = std::to_string(cases) + " cases, " + std::to_string(points) + " snapshots, " +
             std::to_string(mismatches) + " mismatches" + (first.empty() ? "" : " (first: " + first + ")");
  return r;
}

CriterionResult criterion_euclidean(const AuditOptions& o, VerdictLog& log) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 2);
  const Universe hf = Universe::make(Mode::Hf, 4);
  const Universe ord = Universe::make(Mode::Ordinal, 3);
  const std::size_t cases = scaled(o, 200);
  std::size_t forced = 0, uniform_bad = 0;
  std::string first;
  for (std::size_t i = 0; i < cases; ++i) {
    const Universe& u = i % 2 ? ord : hf;
    auto window = random_values(u, rng, 2 + below_n(rng, 7), 64);
    std::vector<std::size_t> perm(window.size());
    for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    auto theta = window_permutation("theta" + std::to_string(i), window, perm);

    ClassSpec a = u.empty_class(), b = u.empty_class();
    if (u.mode() == Mode::Ordinal && below_n(rng, 3) == 0) {
      std::vector<std::pair<ClassSpec, ClassSpec>> builtin{
          {u.limits(), u.even()}, {u.even(), u.ordinals()}, {u.limits(), u.ordinals()},
          {u.odd(), u.successors()}, {u.atoms(), u.non_ordinals()},
          {u.below(SetValue::natural(5)), u.below(SetValue::ordinal(1, 0))}};
      std::tie(a, b) = builtin[below_n(rng, builtin.size())];
    } else {
      auto xs = random_values(u, rng, 2 + below_n(rng, 7), 64);
      b = u.explicit_class(xs);
      std::shuffle(xs.begin(), xs.end(), rng);
      xs.resize(below_n(rng, xs.size()));
      a = u.explicit_class(xs);
    }
    Budget budget;
    budget.seed = o.seed + i;
    auto v = compare(u, Germ::event(theta, a), Relation::Lt, Germ::event(theta, b), fineness_base(), budget);
    if (v.kind == Verdict::Kind::Forced && v.rule == "R1") ++forced;
    else if (first.empty()) first = a.name() + " vs " + b.name() + ": " + to_string(v.kind) + " " + v.rule;
    log.add(2, u, v);

    // Uniformity: two singleton events agree wherever both preimages are present.
    auto outs = random_values(u, rng, 2, 64);
    if (outs.size() == 2) {
      auto px = theta.preimage(outs[0]), py = theta.preimage(outs[1]);
      Germ gx = Germ::event(theta, u.explicit_class({outs[0]}));
      Germ gy = Germ::event(theta, u.explicit_class({outs[1]}));
      for (int s = 0; s < 4; ++s) {
        auto t = random_snapshot(u, rng, {*px, *py});
        if (gx.eval(t) != gy.eval(t) || gx.eval(t) != count_ratio(1, t.size())) ++uniform_bad;
      }
    }
  }
  CriterionResult r{2, "euclidean", false, "", since(t0)};
  r.pass = forced == cases && uniform_bad == 0 && cases >= 200;
  r.detail = std::to_string(forced) + "/" + std::to_string(cases) + " Forced(<) by R1, " +
             std::to_string(uniform_bad) + " uniformity mismatches" + (first.empty() ? "" : " (first miss: " + first + ")");
  return r;
}

CriterionResult criterion_perfect_additivity(const AuditOptions& o, VerdictLog&) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 3);
  const Universe hf = Universe::make(Mode::Hf, 5);
  const Universe ord = Universe::make(Mode::Ordinal, 3);
  const std::size_t cases = scaled(o, 100);
  std::size_t bad = 0, points = 0;
  const auto id = RandomVariable::identity();
  for (std::size_t i = 0; i < cases; ++i) {
    const Universe& u = i % 2 ? ord : hf;
    std::vector<ClassSpec> parts;
    if (u.mode() == Mode::Ordinal && i % 4 == 1) {
      parts = {u.even(), u.odd(), u.non_ordinals()};
    } else {
      const std::size_t n = 1 + below_n(rng, 6);
      std::vector<std::vector<SetValue>> cells(n);
      for (const auto& x : random_values(u, rng, 1 + below_n(rng, 20), 128)) cells[below_n(rng, n)].push_back(x);
      for (auto& c : cells) parts.push_back(u.explicit_class(c));
    }
    std::vector<SetValue> index;
    for (std::size_t j = 0; j < parts.size(); ++j) index.push_back(*u.element_at(j));
    std::vector<std::pair<SetValue, Germ>> terms;
    ClassSpec all = parts[0];
    for (std::size_t j = 0; j < parts.size(); ++j) {
      terms.emplace_back(index[j], Germ::event(id, parts[j]));
      if (j) all = u.union_of(all, parts[j]);
    }
    Germ sigma = Germ::star_sum(terms), whole = Germ::event(id, all);
    // Large sets of the fine filter contain every index.
    for (int s = 0; s < 6; ++s) {
      auto t = random_snapshot(u, rng, index);
      ++points;
      std::size_t n = 0;
      for (const auto& x : t.states())
        n += std::any_of(parts.begin(), parts.end(), [&](const ClassSpec& p) { return p.contains(x); }) ? 1 : 0;
      if (sigma.eval(t) != whole.eval(t) || whole.eval(t) != count_ratio(n, t.size())) ++bad;
    }
  }
  CriterionResult r{3, "perfect-additivity", false, "", since(t0)};
  r.pass = bad == 0 && cases >= 100;
  r.detail = std::to_string(cases) + " partitions, " + std::to_string(points) + " snapshots, " +
             std::to_string(bad) + " mismatches";
  return r;
}

CriterionResult criterion_symmetry_failures(const AuditOptions& o, VerdictLog& log) {
  auto t0 = Clock::now();
  const Universe u = Universe::make(Mode::Ordinal, 3);
  const auto id = RandomVariable::identity();
  Budget budget;
  budget.seed = o.seed;
  auto pi_even = image_class(u, invar_permutation(), u.even());
  auto hume = compare(u, Germ::event(id, pi_even), Relation::Lt, Germ::event(id, u.even()), fineness_base(), budget);
  auto omega = u.below(SetValue::ordinal(1, 0));
  auto shifted = translate_class(u, omega, SetValue::natural(1));
  auto trans = compare(u, Germ::event(id, shifted), Relation::Lt, Germ::event(id, omega), fineness_base(), budget);
  // Repeat to confirm the verdicts do not depend on the run.
  auto hume2 = compare(u, Germ::event(id, pi_even), Relation::Lt, Germ::event(id, u.even()), fineness_base(), budget);
  log.add(4, u, hume);
  log.add(4, u, trans);
  CriterionResult r{4, "symmetry-failures", false, "", since(t0)};
  bool ok1 = hume.kind == Verdict::Kind::Forced && hume2.kind == hume.kind && hume2.rule == hume.rule;
  bool ok2 = trans.kind == Verdict::Kind::Forced;
  r.pass = ok1 && ok2 && r.seconds < 1.0;
  r.detail = "Pr(" + pi_even.name() + ") < Pr(Even): " + to_string(hume.kind) + " " + hume.rule + "; Pr(" +
             shifted.name() + ") < Pr(" + omega.name() + "): " + to_string(trans.kind) + " " + trans.rule;
  return r;
}

CriterionResult criterion_superregularity(const AuditOptions& o, VerdictLog&) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 5);
  const Universe u = Universe::make(Mode::Ordinal, 3);
  const std::size_t cases = scaled(o, 50);
  std::size_t ok = 0, exhausted = 0, failed = 0;
  std::string first;
  for (std::size_t i = 0; i < cases; ++i) {
    std::vector<ClassSpec> small{u.limits(), u.below(SetValue::natural(1 + below_n(rng, 6))),
                                 u.explicit_class(random_values(u, rng, 1 + below_n(rng, 4), 40))};
    std::vector<ClassSpec> large{u.ordinals(), u.even(), u.odd(), u.successors(), u.atoms(), u.non_ordinals(),
                                 u.everything()};
    std::vector<RatioPair> pairs;
    const std::size_t np = 1 + below_n(rng, 4);
    for (std::size_t j = 0; j < np; ++j)
      pairs.push_back({small[below_n(rng, small.size())], large[below_n(rng, large.size())], 1 + below_n(rng, 5)});
    auto pins = random_values(u, rng, below_n(rng, 7), 60);
    try {
      auto f = superreg_witness(u, pins, pairs);
      std::uint64_t n = 0;
      for (const auto& p : pairs) n = std::max(n, p.n);
      bool good = true;
      for (const auto& x : pins) good = good && constraint_membership(Constraint::fineness(x), f, u.mode());
      for (const auto& p : pairs) {
        good = good && constraint_membership(Constraint::ratio(p.a, p.b, p.n), f, u.mode());
        good = good && constraint_membership(Constraint::ratio(p.a, p.b, n), f, u.mode());
      }
      if (good) ++ok;
      else if (first.empty()) first = f.code();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EnumerationExhausted) ++exhausted;
      else ++failed;
      if (first.empty()) first = e.what();
    }
  }
  CriterionResult r{5, "superregularity", false, "", since(t0)};
  r.pass = ok == cases && exhausted == 0 && cases >= 50 && r.seconds < 5.0;
  r.detail = std::to_string(ok) + "/" + std::to_string(cases) + " witnesses verified, " + std::to_string(exhausted) +
             " exhausted, " + std::to_string(failed) + " other errors" + (first.empty() ? "" : " (first: " + first + ")");
  return r;
}

CriterionResult criterion_powerset(const AuditOptions& o, VerdictLog&) {
  auto t0 = Clock::now();
  std::vector<std::string> problems;
  // Staged builder on the rank-4 level of V_5.
  const Universe hf = Universe::make(Mode::Hf, 5);
  std::size_t stages = 0;
  for (std::size_t npairs : {3, 4}) {
    auto pairs = level_pairs(hf, 4, npairs, o.seed + npairs);
    auto st = powerset_prefilter_stage(hf, 4, FilterBase{}, pairs);
    auto fip = check_fip(hf, st.base);
    if (fip.status != FipResult::Status::Witnessed) {
      problems.push_back("stage with " + std::to_string(npairs) + " pairs: " + to_string(fip.status) + " " + fip.reason);
      continue;
    }
    for (const auto& [keys, snap] : fip.witnesses) {
      std::vector<Constraint> cs;
      for (const auto& k : keys)
        if (const Constraint* c = st.base.find(k)) cs.push_back(*c);
      if (!satisfies_all(snap, cs, hf.mode())) problems.push_back("FIP witness fails " + snap.code());
    }
    ++stages;
  }
  // The chain P(A1) < P(A2) < P(A3) = P(A4), and its P^n versions.
  const Universe u = Universe::make(Mode::Ordinal, 3);
  const ClassSpec a[4] = {u.limits(), u.successors(), u.even(), u.union_of(u.atoms(), u.odd())};
  std::string counts;
  for (unsigned n = 1; n <= 3; ++n) {
    ClassSpec p[4] = {iterated_power(u, a[0], n), iterated_power(u, a[1], n), iterated_power(u, a[2], n),
                      iterated_power(u, a[3], n)};
    std::vector<Constraint> lifted{Constraint::order_lt(p[0], p[1]), Constraint::order_lt(p[1], p[2]),
                                   Constraint::order_ge(p[2], p[3]), Constraint::order_ge(p[3], p[2])};
    try {
      auto f = powerset_witness_extend(u, Snapshot{SetValue::natural(0)}, lifted, {});
      std::size_t c[4];
      for (int j = 0; j < 4; ++j) c[j] = f.count_in(p[j]);
      counts += (n > 1 ? "; " : "") + std::string("n=") + std::to_string(n) + " counts " + std::to_string(c[0]) + "<" +
                std::to_string(c[1]) + "<" + std::to_string(c[2]) + "=" + std::to_string(c[3]);
      if (!(c[0] < c[1] && c[1] < c[2] && c[2] == c[3]) || !satisfies_all(f, lifted, u.mode()))
        problems.push_back("chain at n=" + std::to_string(n) + " not satisfied by " + f.code());
    } catch (const Error& e) {
      problems.push_back("chain at n=" + std::to_string(n) + ": " + e.what());
    }
  }
  CriterionResult r{6, "powerset", false, "", since(t0)};
  r.pass = problems.empty() && stages == 2 && r.seconds < 60.0;
  r.detail = std::to_string(stages) + " stages with FIP witnessed; " + counts +
             (problems.empty() ? "" : "; first problem: " + problems.front());
  return r;
}

CriterionResult criterion_ordinal(const AuditOptions& o, VerdictLog& log) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 7);
  const Universe u = Universe::make(Mode::Ordinal, 3);
  const auto id = RandomVariable::identity();
  std::vector<std::pair<ClassSpec, ClassSpec>> pool{{u.limits(), u.ordinals()},
                                                    {u.limits(), u.successors()},
                                                    {u.below(SetValue::natural(3)), u.even()},
                                                    {u.limits(), u.odd()}};
  std::size_t runs = 0, ok = 0, gap_bad = 0;
  std::string first;
  const std::size_t reps = scaled(o, 1);
  const Germ cond_even = conditional_germ(id, u.even(), id, u.ordinals());
  const Germ cond_odd = conditional_germ(id, u.odd(), id, u.ordinals());
  for (std::size_t rep = 0; rep < reps; ++rep)
    for (std::uint64_t k = 1; k <= 5; ++k)
      for (std::uint64_t l = 1; l <= 5; ++l)
        for (std::uint64_t m = 1; m <= 5; ++m) {
          ++runs;
          std::vector<SetValue> pins{SetValue::ordinal(below_n(rng, 3), below_n(rng, 20))};
          auto more = random_values(u, rng, below_n(rng, 4), 60);
          for (const auto& x : more)
            if (pins.size() < 4 && std::find(pins.begin(), pins.end(), x) == pins.end()) pins.push_back(x);
          std::vector<RatioPair> pairs;
          for (std::size_t j = below_n(rng, 3); j > 0; --j) {
            auto& p = pool[below_n(rng, pool.size())];
            pairs.push_back({p.first, p.second, k});
          }
          try {
            auto f = ordinal_witness(u, pins, k, l, m, pairs);
            bool good = constraint_membership(Constraint::interval(l), f, u.mode()) &&
                        constraint_membership(Constraint::weight(m), f, u.mode());
            for (const auto& x : pins) good = good && constraint_membership(Constraint::fineness(x), f, u.mode());
            for (const auto& p : pairs) good = good && constraint_membership(Constraint::ratio(p.a, p.b, k), f, u.mode());
            if (good) ++ok;
            else if (first.empty()) first = f.code();
            // Every interval member: |Pr(Even|On) - Pr(Odd|On)| <= 1/l.
            const Rational gap = abs(Rational(cond_even.eval(f) - cond_odd.eval(f)));
            if (gap > Rational(1, l)) ++gap_bad;
          } catch (const Error& e) {
            if (first.empty()) first = e.what();
          }
        }
  // Classification under the parametric base.
  FilterBase pb({Constraint::all_fineness(), Constraint::all_interval(), Constraint::all_weight()}, "parametric");
  Germ on = Germ::event(id, u.ordinals());
  Germ lim = conditional_germ(id, u.limits(), id, u.ordinals());
  auto c_on = classify_infinitesimal(u, on, pb);
  auto c_lim = classify_infinitesimal(u, lim, pb);
  log.add(7, u, as_verdict(c_on, on));
  log.add(7, u, as_verdict(c_lim, lim));
  // The gap bound as verdicts, one per l.
  std::size_t gap_forced = 0;
  for (std::uint64_t l = 1; l <= 5; ++l) {
    FilterBase fb({Constraint::interval(l), Constraint::fineness(SetValue::natural(0))});
    for (const auto& g : {cond_even - cond_odd, cond_odd - cond_even}) {
      auto v = compare(u, g, Relation::Le, Germ::constant(Rational(1, l)), fb);
      gap_forced += v.kind == Verdict::Kind::Forced ? 1 : 0;
      log.add(7, u, v);
    }
  }
  CriterionResult r{7, "ordinal", false, "", since(t0)};
  bool cls = c_on.kind == Infinitesimal::ApproxZero && c_lim.kind == Infinitesimal::ApproxZero;
  r.pass = ok == runs && gap_bad == 0 && cls && gap_forced == 10;
  r.detail = std::to_string(ok) + "/" + std::to_string(runs) + " witnesses in all four families, " +
             std::to_string(gap_bad) + " gap violations, Pr(On) " + to_string(c_on.kind) + ", Pr(Lim|On) " +
             to_string(c_lim.kind) + ", gap verdicts Forced " + std::to_string(gap_forced) + "/10" +
             (first.empty() ? "" : " (first: " + first + ")");
  return r;
}

CriterionResult criterion_restriction(const AuditOptions& o, VerdictLog&) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 8);
  const Universe hf = Universe::make(Mode::Hf, 5);
  std::vector<SetValue> top;
  for (std::uint64_t i = 0; i < 16; ++i) top.push_back(*hf.element_at(i));
  TierConfig cfg{{5, 9, 13, 17}};
  // Two middle windows (12 and 10 elements) and small windows inside them.
  const Mask mid[2] = {0x0FFF, 0xFFC0};
  const std::vector<Mask> small{0x001F, 0x07F8, 0x0FC0, 0x3F00, 0xFE00};
  std::vector<Mask> windows{mid[0], mid[1]};
  windows.insert(windows.end(), small.begin(), small.end());
  TieredProb tp(top, cfg, bootstrap_base(top, windows, cfg), Mode::Hf);
  const RestrictedBase whole = tp.top_base();

  std::size_t chains = 0, equal = 0, audits = 0, audits_ok = 0;
  std::vector<std::string> problems;
  auto run_audit = [&](const RestrictedBase& rb, const std::string& where) {
    ++audits;
    auto a = tp.audit(rb, o.seed);
    if (a.all()) ++audits_ok;
    else problems.push_back(where + ": " + (a.notes.empty() ? "audit failed" : a.notes.front()));
  };
  auto same = [](const RestrictedBase& x, const RestrictedBase& y) {
    if (x.window != y.window || x.members.size() != y.members.size()) return false;
    for (std::size_t i = 0; i < x.members.size(); ++i)
      if (x.members[i].label != y.members[i].label || !(x.members[i].family == y.members[i].family)) return false;
    return true;
  };
  for (Mask s : mid) {
    const RestrictedBase& rs = tp.restrict_base(s);
    run_audit(rs, "window " + tp.snapshot_of(s).code());
    for (Mask t : small) {
      if ((t & ~s) != 0) continue;
      ++chains;
      auto twice = tp.restrict(rs, t);
      auto once = tp.restrict(whole, t);
      if (same(twice, once)) ++equal;
      else problems.push_back("restriction differs on " + tp.snapshot_of(t).code());
      run_audit(twice, "window " + tp.snapshot_of(t).code());
    }
  }
  // Coherence: T inside S' and S, S' inside S, for random and edge-case events.
  std::size_t coh = 0, coh_ok = 0, leaves = 0;
  std::vector<std::pair<Mask, Mask>> pairs;
  for (Mask s : mid) {
    pairs.push_back({s, tp.full()});
    for (Mask t : small)
      if ((t & ~s) == 0) {
        pairs.push_back({t, s});
        pairs.push_back({t, tp.full()});
      }
  }
  for (auto [t, s] : pairs) {
    const Snapshot tv = tp.snapshot_of(t);
    std::vector<ClassSpec> events{hf.explicit_class({tv.states().begin(), tv.states().end()}), hf.empty_class()};
    for (int j = 0; j < 3; ++j) {
      std::vector<SetValue> xs;
      for (const auto& x : top)
        if (below_n(rng, 2)) xs.push_back(x);
      events.push_back(hf.explicit_class(xs));
    }
    for (const auto& a : events) {
      auto rep = tp.coherence_check(a, t, s, 6, rng());
      ++coh;
      leaves += rep.checked;
      if (rep.passed()) ++coh_ok;
      else problems.push_back("coherence fails for " + a.name() + " on " + tp.snapshot_of(t).code());
    }
  }
  CriterionResult r{8, "restriction", false, "", since(t0)};
  r.pass = problems.empty() && chains > 0 && equal == chains && audits_ok == audits && coh_ok == coh &&
           r.seconds < 30.0;
  r.detail = std::to_string(equal) + "/" + std::to_string(chains) + " chains restrict coherently, " +
             std::to_string(audits_ok) + "/" + std::to_string(audits) + " five-property audits, " +
             std::to_string(coh_ok) + "/" + std::to_string(coh) + " coherence checks (" + std::to_string(leaves) +
             " leaf identities)" + (problems.empty() ? "" : "; first problem: " + problems.front());
  return r;
}

CriterionResult criterion_counterexample(const AuditOptions&, VerdictLog&) {
  auto t0 = Clock::now();
  auto a = non_restriction_counterexample(TierConfig{{5, 9, 13, 17}});
  auto b = non_restriction_counterexample(TierConfig{{5, 9, 13, 17}});
  bool deterministic = a.top_fip == b.top_fip && a.restriction_has_empty == b.restriction_has_empty &&
                       a.repaired == b.repaired && a.notes == b.notes;
  CriterionResult r{9, "counterexample", false, "", since(t0)};
  r.pass = a.demonstrated() && deterministic;
  auto yn = [](bool x) { return x ? "yes" : "no"; };
  r.detail = std::string("top FIP ") + yn(a.top_fip) + ", empty set in tier-0 restriction " +
             yn(a.restriction_has_empty) + ", repaired by SubsetBound " + yn(a.repaired) + ", tier-0 choice restricts " +
             yn(a.small_choice_restricts) + ", complement choice fails " + yn(a.big_choice_fails);
  return r;
}

CriterionResult criterion_soundness(const AuditOptions& o, const VerdictLog& log) {
  auto t0 = Clock::now();
  std::size_t verdicts = 0, sound = 0, refutations = 0, short_of = 0;
  std::string first;
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& e = log.entries[i];
    ++verdicts;
    auto res = audit_verdict(e.universe, e.verdict, o.soundness_witnesses, o.seed + 31 * i);
    refutations += res.refutations;
    if (res.ok(o.soundness_witnesses)) ++sound;
    else {
      if (res.refutations == 0) ++short_of;
      if (first.empty())
        first = "criterion " + std::to_string(e.criterion) + " " + e.verdict.claim + ": " +
                (res.failures.empty() ? std::to_string(res.witnesses) + " witnesses" : res.failures.front());
    }
  }
  CriterionResult r{10, "soundness", false, "", since(t0)};
  r.pass = verdicts > 0 && sound == verdicts && refutations == 0;
  r.detail = std::to_string(sound) + "/" + std::to_string(verdicts) + " Forced verdicts re-verified on " +
             std::to_string(o.soundness_witnesses) + " witnesses each, " + std::to_string(refutations) +
             " refutations, " + std::to_string(short_of) + " short of witnesses" +
             (first.empty() ? "" : " (first: " + first + ")");
  return r;
}

std::vector<CriterionResult> run_acceptance(const AuditOptions& o,
                                            const std::function<void(const CriterionResult&)>& report) {
  VerdictLog log;
  std::vector<CriterionResult> out;
  using Fn = CriterionResult (*)(const AuditOptions&, VerdictLog&);
  const Fn fns[] = {criterion_field_laws,     criterion_euclidean, criterion_perfect_additivity,
                    criterion_symmetry_failures, criterion_superregularity, criterion_powerset,
                    criterion_ordinal,        criterion_restriction, criterion_counterexample};
  int id = 1;
  for (Fn f : fns) {
    CriterionResult r;
    try {
      r = f(o, log);
    } catch (const std::exception& e) {
      r = CriterionResult{id, "criterion", false, std::string("error: ") + e.what(), 0};
    }
    ++id;
    if (report) report(r);
    out.push_back(std::move(r));
  }
  CriterionResult r = criterion_soundness(o, log);
  if (report) report(r);
  out.push_back(std::move(r));
  return out;
}

} // namespace nap
