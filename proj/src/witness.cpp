#include "nap/witness.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <set>

#include "nap/error.hpp"

namespace nap {

namespace {

constexpr std::uint64_t kScan = 1U << 16;

std::vector<SetValue> to_vector(const Snapshot& t) { return {t.states().begin(), t.states().end()}; }

bool in_any(const std::vector<ClassSpec>& classes, const SetValue& x) {
  return std::any_of(classes.begin(), classes.end(), [&](const ClassSpec& c) { return c.contains(x); });
}

SetValue subset_of(Mode mode, std::vector<SetValue> xs) {
  if (xs.empty() && mode == Mode::Ordinal) return SetValue::natural(0);
  return SetValue::set_of(std::move(xs));
}

// Non-ordinal values of an ordinal universe: atoms and singletons of naturals.
SetValue padding_value(std::uint64_t t) {
  if (t % 2 == 0) return SetValue::atom(t / 2);
  return SetValue::set_of({SetValue::natural(t / 2)});
}

} // namespace

unsigned power_depth(const ClassSpec& c) {
  unsigned d = 0;
  for (const ClassSpec* p = &c; p->power_base(); p = p->power_base().get()) ++d;
  return d;
}

Snapshot superreg_witness(const Universe& u, const std::vector<SetValue>& pins,
                          std::vector<RatioPair> pairs) {
  for (const auto& p : pins) u.require(p);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const RatioPair& x, const RatioPair& y) { return x.a.tier() < y.a.tier(); });
  std::uint64_t n = 0;
  for (const auto& p : pairs) n = std::max(n, p.n);

  std::vector<SetValue> f = pins;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const std::size_t a0 = Snapshot(f).count_in(pairs[j].a);
    const std::size_t need = n * a0;
    if (need == 0) continue;
    auto fresh = pairs[j].b.enumerate(f, need, [&](const SetValue& x) {
      for (std::size_t i = 0; i <= j; ++i)
        if (pairs[i].a.contains(x)) return false;
      return true;
    });
    if (fresh.size() < need)
      throw Error(ErrorCode::EnumerationExhausted,
                  pairs[j].b.name() + " minus the smaller classes ran out of fresh members");
    f.insert(f.end(), fresh.begin(), fresh.end());
  }
  // A pair whose B is still missed gets one member of B outside every A.
  for (const auto& p : pairs) {
    if (Snapshot(f).count_in(p.b) > 0) continue;
    auto fresh = p.b.enumerate(f, 1, [&](const SetValue& x) {
      return std::none_of(pairs.begin(), pairs.end(), [&](const RatioPair& q) { return q.a.contains(x); });
    });
    if (fresh.empty())
      throw Error(ErrorCode::EnumerationExhausted, p.b.name() + " has no member outside the A classes");
    f.push_back(fresh.front());
  }
  return Snapshot(std::move(f));
}

Snapshot ordinal_witness(const Universe& u, const std::vector<SetValue>& pins, std::uint64_t k,
                         std::uint64_t l, std::uint64_t m, const std::vector<RatioPair>& pairs) {
  if (u.mode() != Mode::Ordinal) throw Error(ErrorCode::WrongMode, "ordinal witness needs an ordinal universe");
  for (const auto& p : pins) u.require(p);
  k = std::max<std::uint64_t>(k, 1);
  for (const auto& p : pairs) k = std::max(k, p.n);

  auto in_some_a = [&](const SetValue& x) {
    return std::any_of(pairs.begin(), pairs.end(), [&](const RatioPair& p) { return p.a.contains(x); });
  };
  auto successor = [](const SetValue& x, std::uint64_t i) {
    return SetValue::ordinal(x.omega_coeff(), x.finite_part() + i);
  };
  // Outside every A, and so are its l successors.
  auto isolated = [&](const SetValue& x) {
    if (in_some_a(x)) return false;
    if (!x.is_ordinal()) return true;
    for (std::uint64_t i = 1; i <= l; ++i)
      if (in_some_a(successor(x, i))) return false;
    return true;
  };
  auto closure = [&](const std::vector<SetValue>& xs) {
    std::vector<SetValue> out = xs;
    for (const auto& x : xs)
      if (x.is_ordinal())
        for (std::uint64_t i = 1; i <= l; ++i) out.push_back(successor(x, i));
    return canonical(std::move(out));
  };

  // (1) pins, (2) isolated blocks of B, (3) interval closure.
  std::vector<SetValue> a1 = canonical(pins);
  // Weight(m) only holds on nonempty snapshots
  if (a1.empty() && pairs.empty()) a1.push_back(SetValue::natural(0));
  std::vector<SetValue> a2 = closure(a1);
  for (std::size_t round = 0;; ++round) {
    bool changed = false;
    for (const auto& p : pairs) {
      Snapshot t(a2);
      const std::size_t a = t.count_in(p.a);
      const std::size_t b = t.count_in(p.b);
      const std::size_t want = std::max<std::size_t>(k * a, 1);
      if (b >= want) continue;
      auto block = p.b.enumerate(a2, want - b, isolated);
      if (block.size() < want - b)
        throw Error(ErrorCode::EnumerationExhausted,
                    "no " + std::to_string(l) + "-isolated members of " + p.b.name() + " left");
      a1.insert(a1.end(), block.begin(), block.end());
      a1 = canonical(std::move(a1));
      a2 = closure(a1);
      changed = true;
    }
    if (!changed) break;
    if (round > pairs.size() + 2)
      throw Error(ErrorCode::EnumerationExhausted, "isolated blocks did not settle the ratios");
  }
  // (4) j*m non-ordinal pads, outside every A and preferably outside every B.
  const std::size_t need = a2.size() * m;
  std::vector<SetValue> pads;
  std::set<SetValue> taken(a2.begin(), a2.end());
  for (int pass = 0; pass < 2 && pads.size() < need; ++pass) {
    for (std::uint64_t t = 0; t < kScan && pads.size() < need; ++t) {
      SetValue x = padding_value(t);
      if (taken.count(x) || !u.contains(x) || in_some_a(x)) continue;
      if (pass == 0 && std::any_of(pairs.begin(), pairs.end(),
                                   [&](const RatioPair& p) { return p.b.contains(x); }))
        continue;
      taken.insert(x);
      pads.push_back(x);
    }
  }
  if (pads.size() < need) throw Error(ErrorCode::EnumerationExhausted, "not enough non-ordinal padding");
  a2.insert(a2.end(), pads.begin(), pads.end());
  return Snapshot(std::move(a2));
}

namespace {

struct Edge {
  std::size_t from, to;
  bool strict;
};

// Strongly connected components in topological order (sources first).
std::vector<std::vector<std::size_t>> ordered_components(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (const auto& e : edges) reach[e.from][e.to] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    comps.emplace_back();
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j] && reach[j][i]) {
        comp[j] = static_cast<int>(comps.size() - 1);
        comps.back().push_back(j);
      }
  }
  // Sort by number of components that reach this one.
  std::vector<std::size_t> order(comps.size());
  std::vector<std::size_t> above(comps.size(), 0);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t d = 0; d < comps.size(); ++d)
      if (c != d && reach[comps[d][0]][comps[c][0]]) ++above[c];
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return above[x] < above[y]; });
  std::vector<std::vector<std::size_t>> out;
  for (auto c : order) out.push_back(comps[c]);
  return out;
}

} // namespace

Snapshot powerset_witness_extend(const Universe& u, const Snapshot& f_minus,
                                 const std::vector<Constraint>& lifted,
                                 const std::vector<ClassSpec>& frozen, std::size_t max_steps) {
  std::vector<ClassSpec> nodes;
  std::map<std::string, std::size_t> index;
  auto node = [&](const ClassSpec& c) {
    if (!c.power_base())
      throw Error(ErrorCode::ValidationError, c.name() + " is not a power class");
    auto [it, fresh] = index.emplace(c.name(), nodes.size());
    if (fresh) nodes.push_back(c);
    return it->second;
  };
  std::vector<Edge> edges;
  for (const auto& c : lifted) {
    if (c.kind() == Constraint::Kind::OrderLt)
      edges.push_back({node(c.a()), node(c.b()), true});
    else if (c.kind() == Constraint::Kind::OrderGe)
      edges.push_back({node(c.b()), node(c.a()), false});
    else
      throw Error(ErrorCode::ValidationError, c.key() + " is not an order judgement");
  }
  if (nodes.empty()) return f_minus;

  auto comps = ordered_components(nodes.size(), edges);
  std::vector<std::size_t> comp_of(nodes.size());
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (auto i : comps[c]) comp_of[i] = c;
  for (const auto& e : edges)
    if (e.strict && comp_of[e.from] == comp_of[e.to])
      throw Error(ErrorCode::ValidationError, "strict cycle among " + nodes[e.from].name() + " and " +
                                                  nodes[e.to].name());

  std::vector<SetValue> f = to_vector(f_minus);
  std::set<SetValue> present(f.begin(), f.end());
  auto count = [&](std::size_t i) {
    return static_cast<std::size_t>(
        std::count_if(f.begin(), f.end(), [&](const SetValue& x) { return nodes[i].contains(x); }));
  };
  auto satisfied = [&] {
    for (const auto& e : edges) {
      auto a = count(e.from), b = count(e.to);
      if (e.strict ? !(a < b) : !(a <= b)) return false;
    }
    return true;
  };

  // One fresh member of nodes[x] outside every class of `avoid` and `frozen`.
  auto fresh_member = [&](std::size_t x, const std::vector<std::size_t>& avoid) -> SetValue {
    const ClassSpec& px = nodes[x];
    const ClassSpec& base = *px.power_base();
    std::vector<SetValue> markers;
    for (auto y : avoid) {
      const ClassSpec& by = *nodes[y].power_base();
      auto sep = find_separator(base, by);
      if (!sep) {
        bool direct = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
          return (e.from == y && e.to == x) || comp_of[y] == comp_of[x];
        });
        if (direct)
          throw Error(ErrorCode::MarkerMissing,
                      "no member of " + base.name() + " outside " + by.name() + " to separate " +
                          px.name() + " from " + nodes[y].name());
        continue;
      }
      markers.push_back(*sep);
    }
    markers = canonical(std::move(markers));
    auto acceptable = [&](const SetValue& e) {
      if (present.count(e) || !u.contains(e) || !px.contains(e)) return false;
      if (in_any(frozen, e)) return false;
      for (auto y : avoid)
        if (nodes[y].contains(e)) return false;
      return true;
    };
    const bool intensional = !base.extension() && base.tier().is_infinite();
    for (std::uint64_t i = 0; i < kScan; ++i) {
      if (intensional) {
        SetValue e = SetValue::intension(base.name(), markers, i);
        if (acceptable(e)) return e;
        continue;
      }
      std::vector<SetValue> xs = markers;
      bool exhausted = false;
      for (std::uint64_t j = 0; (i >> j) != 0; ++j) {
        if (!((i >> j) & 1U)) continue;
        auto m = base.element_at(j);
        if (!m) {
          exhausted = true;
          break;
        }
        xs.push_back(*m);
      }
      if (exhausted) break;
      SetValue e = subset_of(u.mode(), canonical(std::move(xs)));
      if (acceptable(e)) return e;
    }
    throw Error(ErrorCode::EnumerationExhausted, "no fresh member of " + px.name() + " found");
  };

  std::size_t steps = 0;
  for (int pass = 0; pass < 8; ++pass) {
    std::vector<std::size_t> done;
    for (const auto& comp : comps) {
      std::size_t p = 0;
      for (auto i : comp) p = std::max(p, count(i));
      for (const auto& e : edges)
        if (comp_of[e.to] == comp_of[comp[0]] && comp_of[e.from] != comp_of[comp[0]])
          p = std::max(p, count(e.from) + (e.strict ? 1 : 0));
      for (auto x : comp) {
        while (count(x) < p) {
          if (++steps > max_steps) throw Error(ErrorCode::BudgetExhausted, "power-set extension step limit");
          std::vector<std::size_t> avoid = done;
          for (auto y : comp)
            if (y != x && count(y) >= p) avoid.push_back(y);
          SetValue e = fresh_member(x, avoid);
          present.insert(e);
          f.push_back(e);
        }
      }
      done.insert(done.end(), comp.begin(), comp.end());
    }
    if (satisfied()) return Snapshot(std::move(f));
  }
  throw Error(ErrorCode::EnumerationExhausted, "power-set counts did not settle");
}

bool satisfies_all(const Snapshot& t, const std::vector<Constraint>& constraints, Mode mode) {
  try {
    return std::all_of(constraints.begin(), constraints.end(),
                       [&](const Constraint& c) { return constraint_membership(c, t, mode); });
  } catch (const Error&) {
    return false;
  }
}

std::vector<Constraint> instantiate_all(const Universe& u, const std::vector<Constraint>& constraints,
                                        const Budget& budget) {
  std::vector<Constraint> out;
  for (const auto& c : constraints) {
    if (!c.is_parametric()) {
      out.push_back(c);
      continue;
    }
    if (c.family() != Constraint::Kind::Fineness) {
      out.push_back(c.instantiate(budget.parametric_value));
      continue;
    }
    std::mt19937_64 rng(budget.seed);
    std::uint64_t range = 64;
    if (auto n = u.size()) range = std::min<std::uint64_t>(range, *n);
    std::set<std::uint64_t> picked;
    for (std::size_t i = 0; i < budget.fineness_samples && picked.size() < range; ++i) {
      std::uint64_t idx;
      do idx = rng() % range;
      while (picked.count(idx));
      picked.insert(idx);
      if (auto x = u.element_at(idx)) out.push_back(c.instantiate_point(*x));
    }
  }
  return out;
}

namespace {

using K = Constraint::Kind;

struct Parts {
  std::vector<SetValue> pins;
  std::vector<RatioPair> ratios;
  std::vector<Constraint> orders, lifted, bounds;
  std::uint64_t interval = 0, weight = 0, min_size = 0;
  std::optional<std::uint64_t> max_size;
};

Parts split(const std::vector<Constraint>& cs) {
  Parts p;
  for (const auto& c : cs) {
    switch (c.kind()) {
    case K::Fineness: p.pins.push_back(c.point()); break;
    case K::Ratio: p.ratios.push_back({c.a(), c.b(), c.param()}); break;
    case K::OrderLt:
    case K::OrderGe:
      (power_depth(c.a()) > 0 && power_depth(c.b()) > 0 ? p.lifted : p.orders).push_back(c);
      break;
    case K::Interval: p.interval = std::max(p.interval, c.param()); break;
    case K::Weight: p.weight = std::max(p.weight, c.param()); break;
    case K::SubsetBound: p.bounds.push_back(c); break;
    case K::MinSize: p.min_size = std::max(p.min_size, c.param()); break;
    case K::MaxSize: p.max_size = std::min(p.max_size.value_or(c.param()), c.param()); break;
    case K::Parametric: break;
    }
  }
  p.pins = canonical(std::move(p.pins));
  return p;
}

// A syntactic reason why no snapshot meets every constraint.
std::optional<std::string> refutation(const Parts& p, const std::vector<Constraint>& cs) {
  std::map<std::string, std::size_t> id;
  auto node = [&](const std::string& s) { return id.emplace(s, id.size()).first->second; };
  std::vector<Edge> edges; // from <= to, strict when from < to
  for (const auto& c : cs) {
    if (c.kind() == K::OrderLt) {
      if (c.a().name() == c.b().name()) return c.key() + " is empty";
      edges.push_back({node(c.a().name()), node(c.b().name()), true});
    } else if (c.kind() == K::OrderGe) {
      edges.push_back({node(c.b().name()), node(c.a().name()), false});
    } else if (c.kind() == K::Ratio) {
      if (c.a().name() == c.b().name() && c.param() >= 2) return c.key() + " is empty";
      edges.push_back({node(c.a().name()), node(c.b().name()), c.param() >= 2});
    }
  }
  for (const auto& c : cs)
    if (c.kind() == K::OrderLt)
      for (const auto& d : cs)
        if (d.kind() == K::OrderGe && d.a().name() == c.a().name() && d.b().name() == c.b().name())
          return c.key() + " and " + d.key() + " are disjoint";
  if (!edges.empty()) {
    auto comps = ordered_components(id.size(), edges);
    std::vector<std::size_t> comp_of(id.size());
    for (std::size_t i = 0; i < comps.size(); ++i)
      for (auto v : comps[i]) comp_of[v] = i;
    for (const auto& e : edges)
      if (e.strict && comp_of[e.from] == comp_of[e.to]) return std::string("strict cycle among the count comparisons");
  }
  for (const auto& b : p.bounds) {
    std::size_t inside = 0;
    for (const auto& x : p.pins) inside += b.window().contains(x) ? 1 : 0;
    if (inside >= b.param()) return b.key() + " excludes the pinned points";
  }
  if (p.max_size && p.pins.size() >= *p.max_size) return "the pinned points exceed the size bound";
  if (p.max_size && p.min_size >= *p.max_size) return "size bounds are contradictory";
  return std::nullopt;
}

std::optional<std::vector<SetValue>> finite_members(const ClassSpec& c, std::size_t cap) {
  if (c.extension()) {
    if (c.extension()->size() > cap) return std::nullopt;
    return *c.extension();
  }
  if (c.tier().is_infinite()) return std::nullopt;
  std::vector<SetValue> out;
  for (std::uint64_t i = 0;; ++i) {
    auto x = c.element_at(i);
    if (!x) break;
    if (out.size() >= cap) return std::nullopt;
    out.push_back(*x);
  }
  return out;
}

bool order_holds(const Constraint& c, std::size_t a, std::size_t b) {
  return c.kind() == K::OrderLt ? a < b : a >= b;
}

// Exact search over subsets of the support of the finite order constraints.
// nullopt when the support is too large; an empty optional inside when no
// subset works.
std::optional<std::optional<std::vector<SetValue>>> exact_search(const Parts& p, const Budget& budget) {
  std::vector<SetValue> support;
  for (const auto& c : p.orders) {
    for (const ClassSpec* cls : {&c.a(), &c.b()}) {
      auto ms = finite_members(*cls, 64);
      if (!ms) return std::nullopt;
      support.insert(support.end(), ms->begin(), ms->end());
    }
  }
  support = canonical(std::move(support));
  std::vector<SetValue> free;
  for (const auto& x : support)
    if (!std::binary_search(p.pins.begin(), p.pins.end(), x)) free.push_back(x);
  if (free.size() > budget.max_support || free.size() > 24) return std::nullopt;

  Snapshot pinned(p.pins);
  struct Row {
    std::uint32_t mask_a, mask_b;
    std::size_t pin_a, pin_b;
    const Constraint* c;
  };
  std::vector<Row> rows;
  for (const auto& c : p.orders) {
    Row r{0, 0, pinned.count_in(c.a()), pinned.count_in(c.b()), &c};
    for (std::size_t i = 0; i < free.size(); ++i) {
      if (c.a().contains(free[i])) r.mask_a |= 1U << i;
      if (c.b().contains(free[i])) r.mask_b |= 1U << i;
    }
    rows.push_back(r);
  }
  struct Bound {
    std::uint32_t mask;
    std::size_t pinned, alpha;
  };
  std::vector<Bound> bounds;
  for (const auto& b : p.bounds) {
    Bound r{0, pinned.intersect(b.window()).size(), b.param()};
    for (std::size_t i = 0; i < free.size(); ++i)
      if (b.window().contains(free[i])) r.mask |= 1U << i;
    bounds.push_back(r);
  }
  const std::uint64_t total = std::uint64_t{1} << free.size();
  for (std::uint64_t s = 0; s < total; ++s) {
    const auto m = static_cast<std::uint32_t>(s);
    if (p.max_size && p.pins.size() + std::popcount(m) >= *p.max_size) continue;
    bool ok = true;
    for (const auto& r : rows) {
      std::size_t a = r.pin_a + std::popcount(m & r.mask_a);
      std::size_t b = r.pin_b + std::popcount(m & r.mask_b);
      if (!order_holds(*r.c, a, b)) {
        ok = false;
        break;
      }
    }
    for (const auto& b : bounds)
      if (ok && b.pinned + std::popcount(m & b.mask) >= b.alpha) ok = false;
    if (!ok) continue;
    std::vector<SetValue> chosen;
    for (std::size_t i = 0; i < free.size(); ++i)
      if (m >> i & 1U) chosen.push_back(free[i]);
    return std::optional<std::vector<SetValue>>(std::move(chosen));
  }
  return std::optional<std::vector<SetValue>>();
}

// Greedy repair of order constraints over arbitrary classes.
std::vector<SetValue> greedy_orders(const Parts& p, std::vector<SetValue> f, const Budget& budget) {
  for (std::size_t step = 0; step < budget.repair_steps; ++step) {
    bool changed = false;
    for (const auto& c : p.orders) {
      Snapshot t(f);
      std::size_t a = t.count_in(c.a()), b = t.count_in(c.b());
      if (order_holds(c, a, b)) continue;
      const ClassSpec& grow = c.kind() == K::OrderLt ? c.b() : c.a();
      const ClassSpec& other = c.kind() == K::OrderLt ? c.a() : c.b();
      auto x = grow.enumerate(f, 1, [&](const SetValue& v) { return !other.contains(v); });
      if (x.empty()) return f;
      f.push_back(x.front());
      changed = true;
    }
    if (!changed) break;
  }
  return f;
}

std::vector<ClassSpec> mentioned_classes(const std::vector<Constraint>& cs) {
  std::vector<ClassSpec> out;
  for (const auto& c : cs)
    if (c.has_classes()) {
      out.push_back(c.a());
      out.push_back(c.b());
    }
  return out;
}

} // namespace

SolveResult solve_constraints(const Universe& u, const std::vector<Constraint>& constraints,
                              const Budget& budget) {
  SolveResult res;
  std::vector<Constraint> cs;
  try {
    cs = instantiate_all(u, constraints, budget);
  } catch (const Error& e) {
    res.reason = e.what();
    return res;
  }
  Parts p = split(cs);
  if (auto why = refutation(p, cs)) {
    res.status = SolveResult::Status::Refuted;
    res.reason = *why;
    return res;
  }
  std::vector<SetValue> f = p.pins;
  try {
    for (const auto& x : p.pins) u.require(x);
    if (p.interval > 0 || p.weight > 0) {
      f = to_vector(ordinal_witness(u, p.pins, 1, p.interval, p.weight, p.ratios));
    } else if (!p.ratios.empty()) {
      f = to_vector(superreg_witness(u, p.pins, p.ratios));
    }
    if (!p.orders.empty() || !p.lifted.empty() || !p.bounds.empty()) {
      if (p.ratios.empty() && p.interval == 0 && p.weight == 0) {
        auto found = exact_search(p, budget);
        if (found && !*found) {
          res.status = SolveResult::Status::Refuted;
          res.reason = "no subset of the finite support meets the count constraints";
          return res;
        }
        if (found) {
          f.insert(f.end(), (*found)->begin(), (*found)->end());
        } else {
          f = greedy_orders(p, f, budget);
        }
      } else {
        f = greedy_orders(p, f, budget);
      }
      if (!p.lifted.empty()) {
        std::vector<ClassSpec> frozen = mentioned_classes(p.orders);
        for (const auto& r : p.ratios) {
          frozen.push_back(r.a);
          frozen.push_back(r.b);
        }
        for (const auto& b : p.bounds) frozen.push_back(u.explicit_class(to_vector(b.window())));
        f = to_vector(powerset_witness_extend(u, Snapshot(f), p.lifted, frozen, budget.repair_steps));
      }
    }
    if (f.size() < p.min_size) {
      // Pad with values that no constraint looks at.
      std::vector<ClassSpec> watched = mentioned_classes(cs);
      std::set<SetValue> have(f.begin(), f.end());
      for (std::uint64_t i = 0; i < kScan && have.size() < p.min_size; ++i) {
        auto x = u.element_at(i);
        if (!x) break;
        if (have.count(*x) || in_any(watched, *x)) continue;
        if ((p.interval > 0 || p.weight > 0) && x->is_ordinal()) continue;
        if (std::any_of(p.bounds.begin(), p.bounds.end(),
                        [&](const Constraint& b) { return b.window().contains(*x); }))
          continue;
        have.insert(*x);
        f.push_back(*x);
      }
    }
  } catch (const Error& e) {
    res.reason = e.what();
    return res;
  }
  Snapshot t(std::move(f));
  if (!satisfies_all(t, cs, u.mode())) {
    res.reason = "constructed snapshot " + t.code() + " misses a constraint";
    return res;
  }
  res.status = SolveResult::Status::Found;
  res.witness = std::move(t);
  return res;
}

} // namespace nap
