#include "nap/filter_base.hpp"

#include <random>
#include <set>

#include "nap/error.hpp"

namespace nap {

std::string to_string(FipResult::Status s) {
  switch (s) {
  case FipResult::Status::Witnessed: return "Witnessed";
  case FipResult::Status::Refuted: return "Refuted";
  case FipResult::Status::Unknown: return "Unknown";
  }
  return "?";
}

namespace {

std::string base_key(const Constraint& c) {
  const char* head = c.kind() == Constraint::Kind::OrderLt ? "OrderLt(" : "OrderGe(";
  return head + c.a().power_base()->name() + "," + c.b().power_base()->name() + ")";
}

bool is_lifted(const Constraint& c) {
  return (c.kind() == Constraint::Kind::OrderLt || c.kind() == Constraint::Kind::OrderGe) &&
         c.a().power_base() && c.b().power_base();
}

// Adds base counterparts of lifted judgements, transitively.
std::vector<Constraint> close_subset(const FilterBase& fb, std::vector<Constraint> subset) {
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (!is_lifted(subset[i])) continue;
    const Constraint* base = fb.find(base_key(subset[i]));
    if (!base) continue;
    bool have = std::any_of(subset.begin(), subset.end(), [&](const Constraint& c) { return c == *base; });
    if (!have) subset.push_back(*base);
  }
  return subset;
}

void for_each_subset(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(k);
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == k) return f(idx);
    for (std::size_t i = start; i < n; ++i) {
      idx[pos] = i;
      if (!rec(pos + 1, i + 1)) return false;
    }
    return true;
  };
  rec(0, 0);
}

} // namespace

FipResult check_fip(const Universe& u, const FilterBase& fb, const Budget& budget) {
  FipResult out;
  out.status = FipResult::Status::Witnessed;
  const auto& cs = fb.constraints();
  auto run = [&](const std::vector<std::size_t>& idx) {
    std::vector<Constraint> subset;
    for (auto i : idx) subset.push_back(cs[i]);
    subset = close_subset(fb, std::move(subset));
    std::vector<std::string> keys;
    for (const auto& c : subset) keys.push_back(c.key());
    ++out.subsets_checked;
    auto r = solve_constraints(u, subset, budget);
    if (r.status == SolveResult::Status::Found) {
      out.witnesses.emplace_back(keys, *r.witness);
      return true;
    }
    if (r.status == SolveResult::Status::Refuted) {
      out.status = FipResult::Status::Refuted;
      out.subset = keys;
      out.reason = r.reason;
      return false;
    }
    if (out.status == FipResult::Status::Witnessed) {
      out.status = FipResult::Status::Unknown;
      out.subset = keys;
      out.reason = r.reason;
    }
    return true;
  };
  const std::size_t k_max = std::min(budget.max_subset, cs.size());
  for (std::size_t k = 1; k <= k_max && out.status != FipResult::Status::Refuted; ++k)
    for_each_subset(cs.size(), k, run);
  if (out.status != FipResult::Status::Refuted && cs.size() > k_max) {
    std::vector<std::size_t> all(cs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    run(all);
  }
  if (out.status == FipResult::Status::Refuted) out.witnesses.clear();
  return out;
}

FilterBase fineness_base() { return FilterBase({Constraint::all_fineness()}, "fineness"); }

Constraint lift(const Universe& u, const Constraint& c) {
  if (c.kind() == Constraint::Kind::OrderLt)
    return Constraint::order_lt(u.power_class(c.a()), u.power_class(c.b()));
  if (c.kind() == Constraint::Kind::OrderGe)
    return Constraint::order_ge(u.power_class(c.a()), u.power_class(c.b()));
  throw Error(ErrorCode::ValidationError, "only order judgements lift: " + c.key());
}

StageResult powerset_prefilter_stage(const Universe& u, unsigned level, const FilterBase& prior,
                                     const std::vector<std::pair<SetValue, SetValue>>& pairs,
                                     const Budget& budget) {
  StageResult out{prior, {}};
  if (pairs.empty()) return out;
  std::vector<Constraint> kept;
  for (const auto& [a, b] : pairs) {
    if (u.mode() == Mode::Hf && (rank(a) != level || rank(b) != level))
      throw Error(ErrorCode::ValidationError, "pair (" + a.code() + "," + b.code() + ") is not from level " +
                                                  std::to_string(level));
    ClassSpec ca = u.members_of(a), cb = u.members_of(b);
    auto lt = Constraint::order_lt(ca, cb);
    auto with_lt = out.base.with(lt);
    auto r = check_fip(u, with_lt, budget);
    if (r.status == FipResult::Status::Witnessed) {
      out.base = with_lt;
      out.choices.push_back("Lt");
      kept.push_back(lt);
      continue;
    }
    auto ge = Constraint::order_ge(ca, cb);
    auto with_ge = out.base.with(ge);
    auto r2 = check_fip(u, with_ge, budget);
    out.base = with_ge;
    out.choices.push_back("Ge");
    kept.push_back(ge);
    if (r2.status != FipResult::Status::Witnessed)
      out.base = out.base.with_note("neither branch witnessed for " + ge.key() + ": " + r2.reason);
  }
  for (const auto& c : kept) out.base = out.base.with(lift(u, c));
  std::string tags;
  for (const auto& c : out.choices) tags += c;
  out.base = out.base.with_note("level " + std::to_string(level) + " choices " + tags + ", Lt preferred");
  return out;
}

std::vector<std::pair<SetValue, SetValue>> level_pairs(const Universe& u, unsigned level,
                                                       std::size_t count, std::uint64_t seed) {
  auto cls = u.rank_level(level);
  std::uint64_t n = cls.tier().value();
  if (n < 2) throw Error(ErrorCode::EnumerationExhausted, "rank level too small for pairs");
  std::mt19937_64 rng(seed);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  std::vector<std::pair<SetValue, SetValue>> out;
  while (out.size() < count) {
    std::uint64_t i = rng() % n, j = rng() % n;
    if (i == j || !seen.insert({i, j}).second) continue;
    out.emplace_back(*cls.element_at(i), *cls.element_at(j));
  }
  return out;
}

ClassSpec iterated_power(const Universe& u, const ClassSpec& a, unsigned n) {
  ClassSpec c = a;
  for (unsigned i = 0; i < n; ++i) c = u.power_class(c);
  return c;
}

} // namespace nap
