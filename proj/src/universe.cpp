#include "nap/universe.hpp"

#include <algorithm>
#include <limits>

#include "nap/error.hpp"

namespace nap {

namespace {

constexpr std::uint64_t kScanCap = 1U << 16;
constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(r);
}

// i-th subset of {0..n-1} in size-then-lex order.
std::optional<std::vector<std::uint64_t>> unrank_subset(std::uint64_t n, std::uint64_t i) {
  for (std::uint64_t k = 0; k <= n; ++k) {
    std::uint64_t c = binomial(n, k);
    if (i >= c) {
      i -= c;
      continue;
    }
    std::vector<std::uint64_t> out;
    std::uint64_t next = 0;
    for (std::uint64_t slot = 0; slot < k; ++slot) {
      for (std::uint64_t v = next; v < n; ++v) {
        std::uint64_t rest = binomial(n - v - 1, k - slot - 1);
        if (i < rest) {
          out.push_back(v);
          next = v + 1;
          break;
        }
        i -= rest;
      }
    }
    return out;
  }
  return std::nullopt;
}

// i-th element of `gen` satisfying `pred`, scanning a bounded prefix.
ClassSpec::Generator filtered(ClassSpec::Generator gen, ClassSpec::Predicate pred) {
  return [gen = std::move(gen), pred = std::move(pred)](std::uint64_t i) -> std::optional<SetValue> {
    std::uint64_t seen = 0;
    for (std::uint64_t j = 0; j < kScanCap + i; ++j) {
      auto x = gen(j);
      if (!x) return std::nullopt;
      if (pred(*x) && seen++ == i) return x;
    }
    return std::nullopt;
  };
}

SetValue subset_value(Mode mode, std::vector<SetValue> members) {
  if (members.empty() && mode == Mode::Ordinal) return SetValue::natural(0);
  return SetValue::set_of(std::move(members));
}

} // namespace

std::string to_string(Mode mode) { return mode == Mode::Hf ? "hf" : "ordinal"; }

CardinalityTier CardinalityTier::power() const noexcept {
  switch (kind_) {
  case Kind::Finite:
    return finite(value_ >= 64 ? kSaturated : std::uint64_t{1} << value_);
  case Kind::Tier:
    return tier(value_ + 1);
  case Kind::ProperClass:
    return proper_class();
  }
  return proper_class();
}

std::string CardinalityTier::to_string() const {
  switch (kind_) {
  case Kind::Finite: return "Finite(" + std::to_string(value_) + ")";
  case Kind::Tier: return "Tier(" + std::to_string(value_) + ")";
  case Kind::ProperClass: return "ProperClass";
  }
  return "?";
}

ClassSpec::ClassSpec(std::string name, Mode mode, Predicate contains, Generator generate,
                     CardinalityTier tier)
    : state_(std::make_shared<State>(State{std::move(name), mode, std::move(contains),
                                           std::move(generate), tier, std::nullopt, nullptr, {}})) {}

ClassSpec ClassSpec::with(const std::function<void(State&)>& edit) const {
  auto copy = std::make_shared<State>(*state_);
  edit(*copy);
  ClassSpec out = *this;
  out.state_ = std::move(copy);
  return out;
}

ClassSpec ClassSpec::with_tier(CardinalityTier tier) const {
  return with([&](State& s) { s.tier = tier; });
}
ClassSpec ClassSpec::with_name(std::string name) const {
  return with([&](State& s) { s.name = std::move(name); });
}
ClassSpec ClassSpec::with_extension(std::vector<SetValue> members) const {
  return with([&](State& s) { s.extension = canonical(std::move(members)); });
}
ClassSpec ClassSpec::with_power_base(std::shared_ptr<const ClassSpec> base) const {
  return with([&](State& s) { s.power_base = std::move(base); });
}
ClassSpec ClassSpec::with_superset(std::string name) const {
  return with([&](State& s) { s.supersets.push_back(std::move(name)); });
}

std::vector<SetValue> ClassSpec::enumerate(std::span<const SetValue> exclusions, std::size_t count,
                                           const Predicate& filter,
                                           std::uint64_t scan_limit) const {
  std::vector<SetValue> excluded(exclusions.begin(), exclusions.end());
  std::sort(excluded.begin(), excluded.end());
  std::vector<SetValue> out;
  for (std::uint64_t i = 0; i < scan_limit && out.size() < count; ++i) {
    auto x = element_at(i);
    if (!x) break;
    if (std::binary_search(excluded.begin(), excluded.end(), *x)) continue;
    if (filter && !filter(*x)) continue;
    out.push_back(std::move(*x));
  }
  return out;
}

Universe::Universe(Mode mode, unsigned bound, std::uint64_t width)
    : mode_(mode), bound_(bound), width_(width) {
  std::vector<SetValue> w;
  if (mode == Mode::Hf) {
    std::uint64_t n = hf_level_size(std::min(bound, 5U));
    w.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) w.push_back(hf_from_index(i));
  } else {
    for (std::uint64_t a = 0; a < bound; ++a)
      for (std::uint64_t b = 0; b < width; ++b) w.push_back(SetValue::ordinal(a, b));
    for (std::uint64_t i = 0; i < width; ++i) w.push_back(SetValue::atom(i));
  }
  window_ = std::make_shared<const std::vector<SetValue>>(std::move(w));
}

Universe Universe::make(Mode mode, unsigned bound, std::uint64_t inspection_window) {
  if (mode == Mode::Hf && bound < 3)
    throw Error(ErrorCode::BoundTooSmall, "HF rank bound must be at least 3");
  if (mode == Mode::Ordinal && bound < 1)
    throw Error(ErrorCode::BoundTooSmall, "ordinal bound must be at least 1");
  if (mode == Mode::Hf && bound > kMaxHfBound)
    throw Error(ErrorCode::BoundTooLarge, "HF rank bound at most " + std::to_string(kMaxHfBound));
  if (inspection_window < 4) throw Error(ErrorCode::BoundTooSmall, "inspection window below 4");
  return Universe(mode, bound, inspection_window);
}

std::optional<SetValue> Universe::element_at(std::uint64_t index) const {
  if (mode_ == Mode::Hf) {
    if (bound_ <= 5 && index >= hf_level_size(bound_)) return std::nullopt;
    return hf_from_index(index);
  }
  if (index % 2 == 1) return SetValue::atom(index / 2);
  std::uint64_t i = index / 2;
  return SetValue::ordinal(i % bound_, i / bound_);
}

std::optional<std::uint64_t> Universe::size() const {
  if (mode_ == Mode::Hf && bound_ <= 5) return hf_level_size(bound_);
  return std::nullopt;
}

bool Universe::contains(const SetValue& x) const {
  if (mode_ == Mode::Hf) return x.is_pure() && rank(x) < bound_;
  switch (x.kind()) {
  case ValueKind::Ordinal:
    return x.omega_coeff() < bound_;
  case ValueKind::Atom:
    return true;
  case ValueKind::Set:
  case ValueKind::Intension:
    if (x.is_pure()) return false;
    return std::all_of(x.members().begin(), x.members().end(),
                       [this](const SetValue& m) { return contains(m); });
  }
  return false;
}

void Universe::require(const SetValue& x) const {
  if (!contains(x))
    throw Error(ErrorCode::WrongMode,
                x.code() + " is not a value of the " + to_string(mode_) + " universe (bound " +
                    std::to_string(bound_) + ")");
}

ClassSpec Universe::everything() const {
  auto self = *this;
  auto tier = mode_ == Mode::Hf && size() ? CardinalityTier::finite(*size())
                                          : CardinalityTier::proper_class();
  return ClassSpec("V", mode_, [self](const SetValue& x) { return self.contains(x); },
                   [self](std::uint64_t i) { return self.element_at(i); }, tier);
}

ClassSpec Universe::empty_class() const {
  return ClassSpec("Empty", mode_, [](const SetValue&) { return false; },
                   [](std::uint64_t) -> std::optional<SetValue> { return std::nullopt; },
                   CardinalityTier::finite(0))
      .with_extension({});
}

namespace {
void require_ordinal_mode(const Universe& u, const char* what) {
  if (u.mode() != Mode::Ordinal)
    throw Error(ErrorCode::WrongMode, std::string(what) + " needs an ordinal universe");
}
} // namespace

ClassSpec Universe::ordinals() const {
  require_ordinal_mode(*this, "On");
  const std::uint64_t m = bound_;
  return ClassSpec(
      "On", mode_, [m](const SetValue& x) { return x.is_ordinal() && x.omega_coeff() < m; },
      [m](std::uint64_t i) -> std::optional<SetValue> { return SetValue::ordinal(i % m, i / m); },
      CardinalityTier::tier(0));
}

ClassSpec Universe::even() const {
  require_ordinal_mode(*this, "Even");
  const std::uint64_t m = bound_;
  return ClassSpec(
      "Even", mode_,
      [m](const SetValue& x) { return x.is_ordinal() && x.omega_coeff() < m && x.finite_part() % 2 == 0; },
      [m](std::uint64_t i) -> std::optional<SetValue> { return SetValue::ordinal(i % m, 2 * (i / m)); },
      CardinalityTier::tier(0))
      .with_superset("On");
}

ClassSpec Universe::odd() const {
  require_ordinal_mode(*this, "Odd");
  const std::uint64_t m = bound_;
  return ClassSpec(
      "Odd", mode_,
      [m](const SetValue& x) { return x.is_ordinal() && x.omega_coeff() < m && x.finite_part() % 2 == 1; },
      [m](std::uint64_t i) -> std::optional<SetValue> {
        return SetValue::ordinal(i % m, 2 * (i / m) + 1);
      },
      CardinalityTier::tier(0))
      .with_superset("On");
}

ClassSpec Universe::limits() const {
  require_ordinal_mode(*this, "Lim");
  const std::uint64_t m = bound_;
  return ClassSpec(
      "Lim", mode_, [m](const SetValue& x) { return x.is_limit() && x.omega_coeff() < m; },
      [m](std::uint64_t i) -> std::optional<SetValue> {
        if (i + 1 >= m) return std::nullopt;
        return SetValue::ordinal(i + 1, 0);
      },
      CardinalityTier::tier(0))
      .with_superset("On")
      .with_superset("Even");
}

ClassSpec Universe::successors() const {
  require_ordinal_mode(*this, "Succ");
  const std::uint64_t m = bound_;
  return ClassSpec(
      "Succ", mode_,
      [m](const SetValue& x) { return x.is_ordinal() && x.omega_coeff() < m && x.finite_part() > 0; },
      [m](std::uint64_t i) -> std::optional<SetValue> { return SetValue::ordinal(i % m, i / m + 1); },
      CardinalityTier::tier(0))
      .with_superset("On");
}

ClassSpec Universe::atoms() const {
  require_ordinal_mode(*this, "Atoms");
  return ClassSpec(
      "Atoms", mode_, [](const SetValue& x) { return x.kind() == ValueKind::Atom; },
      [](std::uint64_t i) -> std::optional<SetValue> { return SetValue::atom(i); },
      CardinalityTier::tier(0))
      .with_superset("NonOrd");
}

ClassSpec Universe::non_ordinals() const {
  require_ordinal_mode(*this, "NonOrd");
  auto self = *this;
  return ClassSpec(
      "NonOrd", mode_, [self](const SetValue& x) { return !x.is_ordinal() && self.contains(x); },
      // atoms at even indices, {n} at odd ones
      [](std::uint64_t i) -> std::optional<SetValue> {
        if (i % 2 == 0) return SetValue::atom(i / 2);
        return SetValue::set_of({SetValue::natural(i / 2)});
      },
      CardinalityTier::tier(0));
}

ClassSpec Universe::below(const SetValue& ordinal) const {
  require_ordinal_mode(*this, "initial segment");
  require(ordinal);
  if (!ordinal.is_ordinal()) throw Error(ErrorCode::WrongMode, ordinal.code() + " is not an ordinal");
  const std::uint64_t a = ordinal.omega_coeff();
  const std::uint64_t b = ordinal.finite_part();
  auto contains = [ordinal](const SetValue& x) { return x.is_ordinal() && x < ordinal; };
  auto gen = [a, b](std::uint64_t i) -> std::optional<SetValue> {
    if (i < b) return SetValue::ordinal(a, i);
    if (a == 0) return std::nullopt;
    std::uint64_t j = i - b;
    return SetValue::ordinal(j % a, j / a);
  };
  auto tier = a == 0 ? CardinalityTier::finite(b) : CardinalityTier::tier(0);
  auto out = ClassSpec("Below(" + ordinal.code() + ")", mode_, contains, gen, tier).with_superset("On");
  if (a == 0) {
    std::vector<SetValue> ext;
    for (std::uint64_t i = 0; i < b; ++i) ext.push_back(SetValue::natural(i));
    out = out.with_extension(std::move(ext));
  }
  return out;
}

ClassSpec Universe::rank_level(unsigned alpha) const {
  if (mode_ != Mode::Hf) throw Error(ErrorCode::WrongMode, "RankLevel needs an HF universe");
  if (alpha + 1 > bound_ || alpha > 5)
    throw Error(ErrorCode::BoundTooLarge, "rank level " + std::to_string(alpha) + " outside universe");
  const std::uint64_t lo = hf_level_size(alpha);
  const std::uint64_t hi = alpha + 1 <= 5 ? hf_level_size(alpha + 1) : kSaturated;
  auto out = ClassSpec(
      "Rank(" + std::to_string(alpha) + ")", mode_,
      [alpha](const SetValue& x) { return x.is_pure() && rank(x) == alpha; },
      [lo, hi](std::uint64_t i) -> std::optional<SetValue> {
        if (i >= hi - lo) return std::nullopt;
        return hf_from_index(lo + i);
      },
      CardinalityTier::finite(hi - lo));
  return out;
}

ClassSpec Universe::power_class(const ClassSpec& base) const {
  if (base.mode() != mode_) throw Error(ErrorCode::WrongMode, "power class across modes");
  auto self = *this;
  auto b = std::make_shared<const ClassSpec>(base);
  const Mode mode = mode_;
  auto contains = [self, b](const SetValue& x) {
    if (!self.contains(x)) return false;
    switch (x.kind()) {
    case ValueKind::Set:
      return std::all_of(x.members().begin(), x.members().end(),
                         [&](const SetValue& m) { return b->contains(m); });
    case ValueKind::Ordinal:
      return x.omega_coeff() == 0 && x.finite_part() == 0; // the empty set
    case ValueKind::Intension:
      return (x.intension_class() == b->name() || b->name() == "V") &&
             std::all_of(x.members().begin(), x.members().end(),
                         [&](const SetValue& m) { return b->contains(m); });
    case ValueKind::Atom:
      return false;
    }
    return false;
  };
  ClassSpec::Generator gen;
  std::optional<std::vector<SetValue>> ext;
  if (base.extension() && base.extension()->size() < 64) {
    auto members = *base.extension();
    gen = [members, mode](std::uint64_t i) -> std::optional<SetValue> {
      auto idx = unrank_subset(members.size(), i);
      if (!idx) return std::nullopt;
      std::vector<SetValue> xs;
      for (auto j : *idx) xs.push_back(members[j]);
      return subset_value(mode, std::move(xs));
    };
    if (members.size() <= 12) {
      ext.emplace();
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << members.size()); ++i) ext->push_back(*gen(i));
    }
  } else {
    gen = [b, mode](std::uint64_t i) -> std::optional<SetValue> {
      if (i % 2 == 1) return SetValue::intension(b->name(), {}, i / 2);
      std::uint64_t bits = i / 2;
      std::vector<SetValue> xs;
      for (std::uint64_t j = 0; bits >> j; ++j) {
        if (!(bits >> j & 1U)) continue;
        auto m = b->element_at(j);
        if (!m) return std::nullopt;
        xs.push_back(*m);
      }
      return subset_value(mode, std::move(xs));
    };
  }
  ClassSpec out("P(" + base.name() + ")", mode_, contains, gen, base.tier().power());
  out = out.with_power_base(b);
  if (ext) out = out.with_extension(std::move(*ext));
  return out;
}

ClassSpec Universe::finite_subsets(const ClassSpec& base) const {
  auto p = power_class(base);
  if (base.extension()) return p.with_name("Fin(" + base.name() + ")").with_power_base(nullptr);
  auto self = *this;
  auto b = std::make_shared<const ClassSpec>(base);
  const Mode mode = mode_;
  auto contains = [self, b](const SetValue& x) {
    if (!self.contains(x)) return false;
    if (x.kind() == ValueKind::Ordinal) return x.omega_coeff() == 0 && x.finite_part() == 0;
    if (x.kind() != ValueKind::Set) return false;
    return std::all_of(x.members().begin(), x.members().end(),
                       [&](const SetValue& m) { return b->contains(m); });
  };
  auto gen = [b, mode](std::uint64_t bits) -> std::optional<SetValue> {
    std::vector<SetValue> xs;
    for (std::uint64_t j = 0; bits >> j; ++j) {
      if (!(bits >> j & 1U)) continue;
      auto m = b->element_at(j);
      if (!m) return std::nullopt;
      xs.push_back(*m);
    }
    return subset_value(mode, std::move(xs));
  };
  return ClassSpec("Fin(" + base.name() + ")", mode_, contains, gen, base.tier());
}

ClassSpec Universe::explicit_class(std::vector<SetValue> members, std::string name) const {
  for (const auto& m : members) require(m);
  auto sorted = canonical(std::move(members));
  if (name.empty()) name = SetValue::set_of(sorted).code();
  auto shared = std::make_shared<const std::vector<SetValue>>(sorted);
  return ClassSpec(
             std::move(name), mode_,
             [shared](const SetValue& x) { return std::binary_search(shared->begin(), shared->end(), x); },
             [shared](std::uint64_t i) -> std::optional<SetValue> {
               if (i >= shared->size()) return std::nullopt;
               return (*shared)[i];
             },
             CardinalityTier::finite(sorted.size()))
      .with_extension(std::move(sorted));
}

ClassSpec Universe::members_of(const SetValue& x) const {
  if (x.kind() != ValueKind::Set) throw Error(ErrorCode::WrongMode, x.code() + " is not a finite set");
  return explicit_class({x.members().begin(), x.members().end()}, x.code());
}

ClassSpec Universe::complement(const ClassSpec& a) const {
  auto self = *this;
  return ClassSpec(
      "~" + a.name(), mode_, [self, a](const SetValue& x) { return self.contains(x) && !a.contains(x); },
      filtered([self](std::uint64_t i) { return self.element_at(i); },
               [a](const SetValue& x) { return !a.contains(x); }),
      CardinalityTier::proper_class());
}

ClassSpec Universe::intersection(const ClassSpec& a, const ClassSpec& b) const {
  const auto& first = a.tier() <= b.tier() ? a : b;
  const auto& second = a.tier() <= b.tier() ? b : a;
  auto out = ClassSpec(
                 "(" + a.name() + "&" + b.name() + ")", mode_,
                 [a, b](const SetValue& x) { return a.contains(x) && b.contains(x); },
                 filtered([first](std::uint64_t i) { return first.element_at(i); },
                          [second](const SetValue& x) { return second.contains(x); }),
                 first.tier())
                 .with_superset(a.name())
                 .with_superset(b.name());
  if (first.extension()) {
    std::vector<SetValue> ext;
    for (const auto& x : *first.extension())
      if (second.contains(x)) ext.push_back(x);
    out = out.with_extension(ext).with_tier(CardinalityTier::finite(ext.size()));
  }
  return out;
}

ClassSpec Universe::union_of(const ClassSpec& a, const ClassSpec& b) const {
  auto interleaved = [a, b](std::uint64_t j) -> std::optional<SetValue> {
    auto x = (j % 2 == 0) ? a.element_at(j / 2) : b.element_at(j / 2);
    if (x) return x;
    auto y = (j % 2 == 0) ? b.element_at(j / 2) : a.element_at(j / 2);
    return y;
  };
  // Members of b already produced by a are skipped by requiring first occurrence.
  auto gen = [interleaved](std::uint64_t i) -> std::optional<SetValue> {
    std::vector<SetValue> seen;
    for (std::uint64_t j = 0; j < kScanCap + 2 * i; ++j) {
      auto x = interleaved(j);
      if (!x) return std::nullopt;
      if (std::find(seen.begin(), seen.end(), *x) != seen.end()) continue;
      if (seen.size() == i) return x;
      seen.push_back(*x);
    }
    return std::nullopt;
  };
  auto out = ClassSpec("(" + a.name() + "|" + b.name() + ")", mode_,
                       [a, b](const SetValue& x) { return a.contains(x) || b.contains(x); }, gen,
                       std::max(a.tier(), b.tier()));
  if (a.extension() && b.extension()) {
    std::vector<SetValue> ext = *a.extension();
    ext.insert(ext.end(), b.extension()->begin(), b.extension()->end());
    ext = canonical(std::move(ext));
    out = out.with_extension(ext).with_tier(CardinalityTier::finite(ext.size()));
  }
  return out;
}

ClassSpec Universe::difference(const ClassSpec& a, const ClassSpec& b) const {
  auto out = ClassSpec("(" + a.name() + "-" + b.name() + ")", mode_,
                       [a, b](const SetValue& x) { return a.contains(x) && !b.contains(x); },
                       filtered([a](std::uint64_t i) { return a.element_at(i); },
                                [b](const SetValue& x) { return !b.contains(x); }),
                       a.tier())
                 .with_superset(a.name());
  if (a.extension()) {
    std::vector<SetValue> ext;
    for (const auto& x : *a.extension())
      if (!b.contains(x)) ext.push_back(x);
    out = out.with_extension(ext).with_tier(CardinalityTier::finite(ext.size()));
  }
  return out;
}

ClassSpec builtin_class(const Universe& u, BuiltinName name, unsigned alpha, const ClassSpec* base) {
  switch (name) {
  case BuiltinName::On: return u.ordinals();
  case BuiltinName::Even: return u.even();
  case BuiltinName::Odd: return u.odd();
  case BuiltinName::Lim: return u.limits();
  case BuiltinName::RankLevel: return u.rank_level(alpha);
  case BuiltinName::PowerClass:
  case BuiltinName::FiniteSubsets:
    if (!base) throw Error(ErrorCode::ValidationError, "power class needs a base class");
    return name == BuiltinName::PowerClass ? u.power_class(*base) : u.finite_subsets(*base);
  }
  throw Error(ErrorCode::ValidationError, "unknown builtin class");
}

ClassSpec translate_class(const Universe& u, const ClassSpec& a, const SetValue& alpha) {
  if (u.mode() != Mode::Ordinal || a.mode() != Mode::Ordinal)
    throw Error(ErrorCode::WrongMode, "translation needs an ordinal universe");
  u.require(alpha);
  if (!alpha.is_ordinal()) throw Error(ErrorCode::WrongMode, alpha.code() + " is not an ordinal");
  if (alpha == SetValue::natural(0)) return a;
  const std::uint64_t width = u.window_width();
  const unsigned bound = u.bound();
  auto contains = [a, alpha, width, bound](const SetValue& beta) {
    if (!beta.is_ordinal() || beta.omega_coeff() >= bound) return false;
    if (alpha.omega_coeff() > 0) {
      if (beta.finite_part() != alpha.finite_part() || beta.omega_coeff() < alpha.omega_coeff())
        return false;
      const std::uint64_t head = beta.omega_coeff() - alpha.omega_coeff();
      for (std::uint64_t b = 0; b < width; ++b)
        if (a.contains(SetValue::ordinal(head, b))) return true;
      return false;
    }
    if (beta.finite_part() < alpha.finite_part()) return false;
    return a.contains(SetValue::ordinal(beta.omega_coeff(), beta.finite_part() - alpha.finite_part()));
  };
  auto gen = [a, alpha, bound](std::uint64_t i) -> std::optional<SetValue> {
    std::vector<SetValue> seen;
    for (std::uint64_t j = 0; j < kScanCap + i; ++j) {
      auto g = a.element_at(j);
      if (!g) return std::nullopt;
      auto beta = ordinal_add(*g, alpha);
      if (beta.omega_coeff() >= bound) continue;
      if (std::find(seen.begin(), seen.end(), beta) != seen.end()) continue;
      if (seen.size() == i) return beta;
      seen.push_back(beta);
    }
    return std::nullopt;
  };
  CardinalityTier tier = a.tier();
  if (alpha.omega_coeff() > 0) {
    std::uint64_t heads = 0;
    for (std::uint64_t h = 0; h + alpha.omega_coeff() < bound; ++h)
      for (std::uint64_t b = 0; b < width; ++b)
        if (a.contains(SetValue::ordinal(h, b))) {
          ++heads;
          break;
        }
    tier = CardinalityTier::finite(heads);
  }
  auto out = ClassSpec("(" + a.name() + "+" + alpha.code() + ")", Mode::Ordinal, contains, gen, tier)
                 .with_superset("On");
  if (a.extension()) {
    std::vector<SetValue> ext;
    for (const auto& g : *a.extension()) {
      auto beta = ordinal_add(g, alpha);
      if (beta.omega_coeff() < bound) ext.push_back(beta);
    }
    ext = canonical(std::move(ext));
    out = out.with_extension(ext).with_tier(CardinalityTier::finite(ext.size()));
  }
  return out;
}

bool class_included(const Universe& u, const ClassSpec& a, const ClassSpec& b) {
  if (a.name() == b.name()) return true;
  if (b.name() == "V") return a.mode() == b.mode();
  if (a.name() == "Empty") return true;
  if (std::find(a.supersets().begin(), a.supersets().end(), b.name()) != a.supersets().end())
    return true;
  if (a.extension()) {
    return std::all_of(a.extension()->begin(), a.extension()->end(),
                       [&](const SetValue& x) { return b.contains(x); });
  }
  for (const auto& x : u.inspection_window())
    if (a.contains(x) && !b.contains(x)) return false;
  return true;
}

std::optional<SetValue> find_separator(const ClassSpec& b, const ClassSpec& a,
                                       std::span<const SetValue> exclusions) {
  auto found = b.enumerate(exclusions, 1, [&](const SetValue& x) { return !a.contains(x); });
  if (found.empty()) return std::nullopt;
  return found.front();
}

} // namespace nap
