#include "nap/random_variable.hpp"

#include <algorithm>
#include <set>

#include "nap/error.hpp"

namespace nap {

RandomVariable RandomVariable::identity() {
  auto id = [](const SetValue& x) { return x; };
  return RandomVariable(std::make_shared<const State>(State{Kind::Identity, "id", id, id}));
}

RandomVariable RandomVariable::permutation(std::string name, Map forward, Map inverse) {
  return RandomVariable(std::make_shared<const State>(
      State{Kind::DiagonalPermutation, std::move(name), std::move(forward), std::move(inverse)}));
}

RandomVariable RandomVariable::table(std::string name, std::map<SetValue, SetValue> entries,
                                     std::optional<SetValue> default_outcome) {
  auto shared = std::make_shared<const std::map<SetValue, SetValue>>(std::move(entries));
  std::shared_ptr<const SetValue> fallback;
  if (default_outcome) fallback = std::make_shared<const SetValue>(*default_outcome);
  auto forward = [shared, fallback](const SetValue& x) {
    auto it = shared->find(x);
    if (it != shared->end()) return it->second;
    return fallback ? *fallback : x;
  };
  return RandomVariable(
      std::make_shared<const State>(State{Kind::Table, std::move(name), forward, nullptr}));
}

std::optional<SetValue> RandomVariable::preimage(const SetValue& outcome) const {
  if (!state_->inverse) return std::nullopt;
  return state_->inverse(outcome);
}

namespace {
bool is_natural(const SetValue& x) { return x.is_ordinal() && x.omega_coeff() == 0; }
} // namespace

RandomVariable invar_permutation() {
  auto forward = [](const SetValue& x) {
    if (!is_natural(x)) return x;
    std::uint64_t n = x.finite_part();
    if (n % 2 == 0) return SetValue::natural(n + 2);
    if (n == 1) return SetValue::natural(0);
    return SetValue::natural(n - 2);
  };
  auto inverse = [](const SetValue& y) {
    if (!is_natural(y)) return y;
    std::uint64_t n = y.finite_part();
    if (n == 0) return SetValue::natural(1);
    if (n % 2 == 0) return SetValue::natural(n - 2);
    return SetValue::natural(n + 2);
  };
  return RandomVariable::permutation("pi", forward, inverse);
}

RandomVariable window_permutation(std::string name, std::vector<SetValue> window,
                                  std::vector<std::size_t> perm) {
  if (window.size() != perm.size())
    throw Error(ErrorCode::ValidationError, "permutation length mismatch");
  std::vector<std::size_t> check = perm;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i)
    if (check[i] != i) throw Error(ErrorCode::ValidationError, "not a permutation");
  if (canonical(window).size() != window.size())
    throw Error(ErrorCode::ValidationError, "window has duplicates");
  auto fwd = std::make_shared<std::map<SetValue, SetValue>>();
  auto inv = std::make_shared<std::map<SetValue, SetValue>>();
  for (std::size_t i = 0; i < window.size(); ++i) {
    (*fwd)[window[i]] = window[perm[i]];
    (*inv)[window[perm[i]]] = window[i];
  }
  auto lookup = [](std::shared_ptr<std::map<SetValue, SetValue>> m) {
    return [m](const SetValue& x) {
      auto it = m->find(x);
      return it == m->end() ? x : it->second;
    };
  };
  return RandomVariable::permutation(std::move(name), lookup(fwd), lookup(inv));
}

bool is_bijective_on(const RandomVariable& rv, std::span<const SetValue> window) {
  std::set<SetValue> images;
  for (const auto& x : window)
    if (!images.insert(rv(x)).second) return false;
  if (!rv.is_diagonal()) return true;
  for (const auto& y : window) {
    auto pre = rv.preimage(y);
    if (!pre || rv(*pre) != y) return false;
  }
  return true;
}

ClassSpec image_class(const Universe& u, const RandomVariable& rv, const ClassSpec& a) {
  if (!rv.is_diagonal())
    throw Error(ErrorCode::ValidationError, "image class needs a diagonal random variable");
  auto contains = [u, rv, a](const SetValue& y) {
    if (!u.contains(y)) return false;
    auto pre = rv.preimage(y);
    return pre && a.contains(*pre);
  };
  auto gen = [rv, a](std::uint64_t i) -> std::optional<SetValue> {
    auto x = a.element_at(i);
    if (!x) return std::nullopt;
    return rv(*x);
  };
  auto out = ClassSpec(rv.name() + "[" + a.name() + "]", a.mode(), contains, gen, a.tier());
  if (a.extension()) {
    std::vector<SetValue> ext;
    for (const auto& x : *a.extension()) ext.push_back(rv(x));
    out = out.with_extension(std::move(ext));
  }
  return out;
}

} // namespace nap
