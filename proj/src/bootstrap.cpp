#include "nap/bootstrap.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <random>

#include "nap/error.hpp"

namespace nap {

void TierConfig::validate() const {
  if (thresholds.empty() || thresholds.front() < 2)
    throw Error(ErrorCode::ValidationError, "tier thresholds must start at 2 or more");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] <= thresholds[i - 1])
      throw Error(ErrorCode::ValidationError, "tier thresholds must increase");
}

unsigned TierConfig::tier(std::size_t n) const {
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    if (n < thresholds[i]) return static_cast<unsigned>(i);
  return static_cast<unsigned>(thresholds.size());
}

std::size_t TierConfig::alpha(std::size_t n) const {
  unsigned t = tier(n);
  if (t == 0) throw Error(ErrorCode::ValidationError, "a tier-0 window has no smaller snapshots to index");
  return thresholds[t - 1];
}

Family::Family(unsigned width) : width_(width), bits_(((std::uint64_t{1} << width) + 63) / 64, 0) {
  if (width > 16) throw Error(ErrorCode::BoundTooLarge, "windows hold at most 16 values");
}

std::size_t Family::count() const {
  std::size_t n = 0;
  for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<Mask> Family::members() const {
  std::vector<Mask> out;
  for (Mask m = 0; m < (Mask{1} << width_); ++m)
    if (test(m)) out.push_back(m);
  return out;
}

Family Family::operator&(const Family& o) const {
  if (o.width_ != width_) throw Error(ErrorCode::ValidationError, "families over different windows");
  Family out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= o.bits_[i];
  return out;
}

Mask extract_bits(Mask m, Mask sub) {
  Mask out = 0;
  unsigned j = 0;
  for (unsigned i = 0; i < 32; ++i) {
    if (!((sub >> i) & 1U)) continue;
    if ((m >> i) & 1U) out |= Mask{1} << j;
    ++j;
  }
  return out;
}

Family restrict_constraint_set(const Family& x, Mask sub, std::size_t alpha) {
  Family out(static_cast<unsigned>(std::popcount(sub)));
  for (Mask z = 0; z < (Mask{1} << x.width()); ++z) {
    if (!x.test(z)) continue;
    Mask y = z & sub;
    if (static_cast<std::size_t>(std::popcount(y)) < alpha) out.set(extract_bits(y, sub));
  }
  return out;
}

const LabeledFamily* RestrictedBase::find(const std::string& label) const {
  for (const auto& m : members)
    if (m.label == label) return &m;
  return nullptr;
}

TieredProb::TieredProb(std::vector<SetValue> top, TierConfig cfg, FilterBase base, Mode mode)
    : top_(canonical(std::move(top))), cfg_(std::move(cfg)), base_(std::move(base)), mode_(mode) {
  cfg_.validate();
  if (top_.size() > 16) throw Error(ErrorCode::BoundTooLarge, "top window holds at most 16 values");
  if (cfg_.tier(top_.size()) == 0) throw Error(ErrorCode::ValidationError, "top window must have tier >= 1");
}

Mask TieredProb::mask_of(const std::vector<SetValue>& xs) const {
  Mask m = 0;
  for (const auto& x : xs) {
    auto it = std::lower_bound(top_.begin(), top_.end(), x);
    if (it == top_.end() || *it != x) throw Error(ErrorCode::ValidationError, x.code() + " is not in the window");
    m |= Mask{1} << (it - top_.begin());
  }
  return m;
}

Snapshot TieredProb::snapshot_of(Mask m) const {
  std::vector<SetValue> xs;
  for (std::size_t i = 0; i < top_.size(); ++i)
    if ((m >> i) & 1U) xs.push_back(top_[i]);
  return Snapshot(std::move(xs));
}

unsigned TieredProb::tier(Mask m) const { return cfg_.tier(static_cast<std::size_t>(std::popcount(m))); }

Family TieredProb::family_of(const Constraint& c) const {
  const auto n = static_cast<unsigned>(top_.size());
  const std::size_t alpha = cfg_.alpha(n);
  Family out(n);
  using K = Constraint::Kind;
  Mask point = 0, window = 0;
  if (c.kind() == K::Fineness) {
    auto it = std::lower_bound(top_.begin(), top_.end(), c.point());
    if (it != top_.end() && *it == c.point()) point = Mask{1} << (it - top_.begin());
  }
  if (c.kind() == K::SubsetBound)
    for (const auto& x : c.window().states()) {
      auto it = std::lower_bound(top_.begin(), top_.end(), x);
      if (it != top_.end() && *it == x) window |= Mask{1} << (it - top_.begin());
    }
  for (Mask z = 0; z < (Mask{1} << n); ++z) {
    const auto size = static_cast<std::size_t>(std::popcount(z));
    if (size >= alpha) continue;
    bool in = false;
    switch (c.kind()) {
    case K::Fineness: in = point != 0 && (z & point); break;
    case K::SubsetBound: in = static_cast<std::size_t>(std::popcount(z & window)) < c.param(); break;
    case K::MinSize: in = size >= c.param(); break;
    case K::MaxSize: in = size < c.param(); break;
    default: in = constraint_membership(c, snapshot_of(z), mode_); break;
    }
    if (in) out.set(z);
  }
  return out;
}

RestrictedBase TieredProb::top_base() const {
  RestrictedBase rb;
  rb.window = full();
  rb.alpha = cfg_.alpha(top_.size());
  for (const auto& c : base_.constraints()) {
    LabeledFamily lf{c.key(), std::nullopt, family_of(c)};
    if (c.kind() == Constraint::Kind::SubsetBound) {
      Mask w = 0;
      for (const auto& x : c.window().states()) w |= mask_of({x});
      lf.bound_of = w;
    }
    rb.members.push_back(std::move(lf));
  }
  return rb;
}

RestrictedBase TieredProb::restrict(const RestrictedBase& from, Mask sub) const {
  if ((sub & ~from.window) != 0 || sub == from.window)
    throw Error(ErrorCode::ValidationError, "restriction needs a proper sub-window");
  const LabeledFamily* bound = nullptr;
  for (const auto& m : from.members)
    if (m.bound_of && *m.bound_of == sub) bound = &m;
  if (!bound)
    throw Error(ErrorCode::MissingSubsetBound, "no SubsetBound for " + snapshot_of(sub).code());
  RestrictedBase out;
  out.window = sub;
  out.alpha = cfg_.alpha(static_cast<std::size_t>(std::popcount(sub)));
  const Mask local = extract_bits(sub, from.window);
  for (const auto& m : from.members) {
    LabeledFamily lf{m.label, std::nullopt, restrict_constraint_set(m.family & bound->family, local, out.alpha)};
    if (m.bound_of && (*m.bound_of & ~sub) == 0) lf.bound_of = m.bound_of;
    out.members.push_back(std::move(lf));
  }
  return out;
}

const RestrictedBase& TieredProb::restrict_base(Mask sub) const {
  std::lock_guard<std::mutex> lock(memo_mutex_);
  auto it = memo_.find(sub);
  if (it != memo_.end()) return *it->second;
  auto rb = std::make_unique<RestrictedBase>(restrict(top_base(), sub));
  return *memo_.emplace(sub, std::move(rb)).first->second;
}

bool family_fip(const RestrictedBase& rb, std::size_t k) {
  const auto& ms = rb.members;
  const std::size_t n = ms.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (ms[i].family.empty()) return false;
    if (k < 2) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      Family ij = ms[i].family & ms[j].family;
      if (ij.empty()) return false;
      if (k < 3) continue;
      for (std::size_t l = j + 1; l < n; ++l)
        if ((ij & ms[l].family).empty()) return false;
    }
  }
  return true;
}

PropertyAudit TieredProb::audit(const RestrictedBase& rb, std::uint64_t seed) const {
  PropertyAudit a;
  const auto width = static_cast<unsigned>(std::popcount(rb.window));
  const Mask all = static_cast<Mask>((std::uint64_t{1} << width) - 1);

  // (1) fineness survives for every x of the window.
  a.fine = true;
  for (unsigned i = 0, bit = 0; i < top_.size(); ++i) {
    if (!((rb.window >> i) & 1U)) continue;
    const LabeledFamily* f = rb.find("Fineness(" + top_[i].code() + ")");
    bool ok = f && !f->family.empty();
    if (ok)
      for (Mask y : f->family.members())
        if (!((y >> bit) & 1U)) ok = false;
    if (!ok) {
      a.fine = false;
      a.notes.push_back("fineness fails at " + top_[i].code());
    }
    ++bit;
  }
  // (2) finite intersections.
  a.fip = family_fip(rb, 3);
  if (!a.fip) a.notes.push_back("some three members do not meet");

  // (3) for sampled X, X or its complement is compatible with the base.
  Family whole(width);
  for (Mask y = 0; y <= all; ++y)
    if (static_cast<std::size_t>(std::popcount(y)) < rb.alpha) whole.set(y);
  auto compatible = [&](const Family& x) {
    for (std::size_t i = 0; i < rb.members.size(); ++i) {
      Family xi = x & rb.members[i].family;
      if (xi.empty()) return false;
      for (std::size_t j = i + 1; j < rb.members.size(); ++j)
        if ((xi & rb.members[j].family).empty()) return false;
    }
    return !x.empty();
  };
  std::mt19937_64 rng(seed);
  a.ultra = true;
  for (int s = 0; s < 12; ++s) {
    Family x(width), xc(width);
    for (Mask y = 0; y <= all; ++y) {
      if (!whole.test(y)) continue;
      bool in = s < static_cast<int>(width) ? ((y >> s) & 1U) != 0 : (rng() & 1U) != 0;
      (in ? x : xc).set(y);
    }
    if (!compatible(x) && !compatible(xc)) {
      a.ultra = false;
      a.notes.push_back("neither a sampled set nor its complement fits the base");
    }
  }
  // (4) no single snapshot lies in every member.
  a.non_principal = true;
  for (Mask y = 0; y <= all; ++y) {
    if (!whole.test(y)) continue;
    bool everywhere = std::all_of(rb.members.begin(), rb.members.end(),
                                  [&](const LabeledFamily& m) { return m.family.test(y); });
    if (everywhere) {
      a.non_principal = false;
      a.notes.push_back("principal at a snapshot of size " + std::to_string(std::popcount(y)));
      break;
    }
  }
  // (5) no member is empty.
  a.no_empty = std::none_of(rb.members.begin(), rb.members.end(),
                            [](const LabeledFamily& m) { return m.family.empty(); });
  if (!a.no_empty) a.notes.push_back("the empty set belongs to the restriction");
  return a;
}

TieredValue TieredGerm::eval(Mask y) const {
  if ((y & ~window_) != 0) throw Error(ErrorCode::ValidationError, "snapshot outside the window");
  if (y == 0) throw Error(ErrorCode::EmptySnapshot, "tiered probability on an empty snapshot");
  const unsigned ty = tp_->tier(y);
  if (ty >= tp_->tier(window_)) throw Error(ErrorCode::ValidationError, "snapshot not below the window's tier");
  if (ty == 0) return count_ratio(std::popcount(event_ & y), std::popcount(y));
  return std::make_shared<const TieredGerm>(tp_, event_ & y, y);
}

TieredGerm TieredProb::tiered_prob(const ClassSpec& a, const RandomVariable& theta, Mask window) const {
  if (tier(window) < 1) throw Error(ErrorCode::ValidationError, "tiered probability needs a window of tier >= 1");
  Mask event = 0;
  for (std::size_t i = 0; i < top_.size(); ++i)
    if (a.contains(theta(top_[i]))) event |= Mask{1} << i;
  return TieredGerm(this, event & window, window);
}

namespace {

// Sub-masks of `x` satisfying `ok`, sampled without replacement.
std::vector<Mask> sample_submasks(Mask x, std::size_t want, std::mt19937_64& rng,
                                  const std::function<bool(Mask)>& ok) {
  std::vector<Mask> all;
  for (Mask y = x;; y = (y - 1) & x) {
    if (ok(y)) all.push_back(y);
    if (y == 0) break;
  }
  std::shuffle(all.begin(), all.end(), rng);
  if (all.size() > want) all.resize(want);
  return all;
}

} // namespace

CoherenceReport TieredProb::coherence_check(const ClassSpec& a, Mask t, Mask s, std::size_t per_level,
                                            std::uint64_t seed) const {
  if ((t & ~s) != 0 || t == s) throw Error(ErrorCode::ValidationError, "T must be a proper part of S");
  if (tier(t) >= tier(s)) throw Error(ErrorCode::ValidationError, "T must have a smaller tier than S");
  const std::size_t alpha_t = tier(t) > 0 ? cfg_.alpha(static_cast<std::size_t>(std::popcount(t))) : 0;
  Mask event = 0;
  for (std::size_t i = 0; i < top_.size(); ++i)
    if (a.contains(top_[i])) event |= Mask{1} << i;
  const Mask at = event & t; // A & T

  CoherenceReport rep;
  std::mt19937_64 rng(seed);
  // Admissible X: inside (R^T)_W and meeting T.
  auto admissible = [&](Mask x, Mask w, Mask pins) {
    if ((x & t) == 0 || (x & pins) != pins) return false;
    if (alpha_t && static_cast<std::size_t>(std::popcount(x & t)) >= alpha_t) return false;
    return static_cast<std::size_t>(std::popcount(x)) < cfg_.alpha(static_cast<std::size_t>(std::popcount(w)));
  };
  // Pr^{X&T}(A&T) against Pr^X(A&T | T), reduced to leaves.
  std::function<void(Mask)> check = [&](Mask x) {
    if (tier(x) == 0) {
      auto pc = [](Mask m) { return static_cast<std::size_t>(std::popcount(m)); };
      Rational lhs = count_ratio(pc(at & x), pc(x & t)); // Pr^{X&T}(A&T), a leaf
      Rational num = count_ratio(pc(at & x), pc(x));     // f_{A&T}(X)
      Rational den = count_ratio(pc(t & x), pc(x));      // f_T(X)
      Rational rhs = num / den;
      bool pass = lhs == rhs;
      ++rep.checked;
      if (!pass) ++rep.failures;
      if (rep.records.size() < 32 || !pass) rep.records.push_back({x, lhs, rhs, pass});
      return;
    }
    // Germ level: the identity must hold on the large sets of U_X, which
    // contain every x of a tier-0 X & T (fineness) and bound |Y & T|.
    Mask pins = tier(x & t) == 0 ? (x & t) : 0;
    auto ys = sample_submasks(x, per_level, rng, [&](Mask y) { return y != x && admissible(y, x, pins); });
    for (Mask y : ys) check(y);
  };
  auto xs = sample_submasks(s, 4 * per_level, rng, [&](Mask x) { return admissible(x, s, 0); });
  for (Mask x : xs) check(x);
  return rep;
}

FilterBase bootstrap_base(const std::vector<SetValue>& top, const std::vector<Mask>& windows,
                          const TierConfig& cfg) {
  auto sorted = canonical(top);
  std::vector<Constraint> cs;
  for (const auto& x : sorted) cs.push_back(Constraint::fineness(x));
  for (Mask w : windows) {
    std::vector<SetValue> xs;
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if ((w >> i) & 1U) xs.push_back(sorted[i]);
    const std::size_t n = xs.size();
    cs.push_back(Constraint::subset_bound(Snapshot(std::move(xs)), cfg.alpha(n)));
  }
  return FilterBase(std::move(cs), "bootstrap lattice");
}

CounterexampleReport non_restriction_counterexample(const TierConfig& cfg) {
  cfg.validate();
  if (cfg.thresholds.size() < 2) throw Error(ErrorCode::ValidationError, "the counterexample needs two tiers");
  CounterexampleReport rep;
  const std::size_t t0 = cfg.thresholds[0];
  // Top window: tier 2 at the smallest size, capped at 16.
  const std::size_t n = std::min<std::size_t>(cfg.thresholds[1], 16);
  std::vector<SetValue> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(SetValue::atom(i));
  std::vector<Constraint> cs;
  for (const auto& x : atoms) cs.push_back(Constraint::fineness(x));
  const Constraint big = Constraint::min_size(t0);   // complement of the tier-0 snapshots
  const Constraint small = Constraint::max_size(t0); // the tier-0 snapshots
  cs.push_back(big);
  TieredProb tp(atoms, cfg, FilterBase(cs, "atoms plus non-tier-0"), Mode::Ordinal);

  RestrictedBase top = tp.top_base();
  rep.top_fip = family_fip(top, 3);

  // Restricting the index to tier 0: X & [S]^{<t0}.
  auto index_restrict = [&](const RestrictedBase& rb) {
    std::vector<Family> out;
    for (const auto& m : rb.members) {
      Family f(static_cast<unsigned>(n));
      for (Mask z : m.family.members())
        if (static_cast<std::size_t>(std::popcount(z)) < t0) f.set(z);
      out.push_back(std::move(f));
    }
    return out;
  };
  auto restricted = index_restrict(top);
  rep.restriction_has_empty =
      std::any_of(restricted.begin(), restricted.end(), [](const Family& f) { return f.empty(); });
  if (rep.restriction_has_empty) rep.notes.push_back("the empty set lies in the tier-0 restriction");

  // Repair: window restriction through SubsetBound on a smaller window.
  const std::size_t sub_n = std::max<std::size_t>(t0, 2);
  if (cfg.tier(sub_n) >= 1 && sub_n < n) {
    Mask sub = static_cast<Mask>((std::uint64_t{1} << sub_n) - 1);
    std::vector<SetValue> sub_atoms(atoms.begin(), atoms.begin() + static_cast<long>(sub_n));
    auto repaired_cs = cs;
    repaired_cs.push_back(Constraint::subset_bound(Snapshot(sub_atoms), cfg.alpha(sub_n)));
    TieredProb tp2(atoms, cfg, FilterBase(repaired_cs, "with SubsetBound"), Mode::Ordinal);
    auto rb = tp2.restrict(tp2.top_base(), sub);
    auto audit = tp2.audit(rb);
    rep.repaired = audit.all();
    for (const auto& note : audit.notes) rep.notes.push_back("repair: " + note);
  } else {
    rep.notes.push_back("tier config leaves no room for a restricting sub-window");
  }

  // Dichotomy: the base decides between the tier-0 family and its complement.
  auto with = [&](const Constraint& c) {
    auto ext = cs;
    ext.pop_back(); // drop `big`, keep fineness
    ext.push_back(c);
    TieredProb tpc(atoms, cfg, FilterBase(ext), Mode::Ordinal);
    auto rb = tpc.top_base();
    auto r = index_restrict(rb);
    bool proper = std::none_of(r.begin(), r.end(), [](const Family& f) { return f.empty(); });
    // Budgeted FIP inside the restriction.
    for (std::size_t i = 0; proper && i < r.size(); ++i)
      for (std::size_t j = i + 1; proper && j < r.size(); ++j)
        if ((r[i] & r[j]).empty()) proper = false;
    return proper;
  };
  rep.small_choice_restricts = with(small);
  rep.big_choice_fails = !with(big);
  return rep;
}

} // namespace nap
