#include "nap/snapshot.hpp"

#include <algorithm>

#include "nap/error.hpp"

namespace nap {

bool Snapshot::contains(const SetValue& x) const {
  return std::binary_search(states_.begin(), states_.end(), x);
}

Snapshot Snapshot::with(std::span<const SetValue> extra) const {
  std::vector<SetValue> all = states_;
  all.insert(all.end(), extra.begin(), extra.end());
  return Snapshot(std::move(all));
}

Snapshot Snapshot::intersect(const Snapshot& other) const {
  std::vector<SetValue> out;
  std::set_intersection(states_.begin(), states_.end(), other.states_.begin(), other.states_.end(),
                        std::back_inserter(out));
  Snapshot s;
  s.states_ = std::move(out);
  return s;
}

std::string Snapshot::code() const {
  std::string s = "{";
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (i) s += ',';
    s += states_[i].code();
  }
  return s + "}";
}

std::size_t Snapshot::count_in(const ClassSpec& a) const {
  return static_cast<std::size_t>(
      std::count_if(states_.begin(), states_.end(), [&](const SetValue& x) { return a.contains(x); }));
}

Snapshot parse_snapshot(std::string_view text) {
  // A snapshot is written like a set; parse as one and take its members.
  std::string s(text);
  auto v = parse_value(s);
  if (v.kind() != ValueKind::Set) throw Error(ErrorCode::ParseError, "snapshot must be braced: " + s);
  return Snapshot(std::vector<SetValue>(v.members().begin(), v.members().end()));
}

std::size_t count_event(const RandomVariable& theta, const ClassSpec& a, const Snapshot& t) {
  std::size_t n = 0;
  for (const auto& s : t.states())
    if (a.contains(theta(s))) ++n;
  return n;
}

Rational snapshot_prob(const RandomVariable& theta, const ClassSpec& a, const Snapshot& t) {
  if (t.empty()) throw Error(ErrorCode::EmptySnapshot, "probability on an empty snapshot");
  return count_ratio(count_event(theta, a, t), t.size());
}

namespace {
std::size_t count_joint(const RandomVariable& theta, const ClassSpec& a, const RandomVariable& nu,
                        const ClassSpec& b, const Snapshot& t) {
  std::size_t n = 0;
  for (const auto& s : t.states())
    if (a.contains(theta(s)) && b.contains(nu(s))) ++n;
  return n;
}
} // namespace

Rational joint_snapshot_prob(const RandomVariable& theta, const ClassSpec& a,
                             const RandomVariable& nu, const ClassSpec& b, const Snapshot& t) {
  if (t.empty()) throw Error(ErrorCode::EmptySnapshot, "probability on an empty snapshot");
  return count_ratio(count_joint(theta, a, nu, b, t), t.size());
}

Rational conditional_snapshot_prob(const RandomVariable& theta, const ClassSpec& a,
                                   const RandomVariable& nu, const ClassSpec& b, const Snapshot& t) {
  if (t.empty()) throw Error(ErrorCode::EmptySnapshot, "probability on an empty snapshot");
  std::size_t cond = count_event(nu, b, t);
  if (cond == 0) throw Error(ErrorCode::ConditionNull, "no state of " + t.code() + " meets " + b.name());
  return count_ratio(count_joint(theta, a, nu, b, t), cond);
}

} // namespace nap
