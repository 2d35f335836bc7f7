#ifndef NAP_SNAPSHOT_HPP
#define NAP_SNAPSHOT_HPP

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "nap/random_variable.hpp"
#include "nap/rational.hpp"
#include "nap/set_value.hpp"
#include "nap/universe.hpp"

namespace nap {

/// A finite set of states, kept sorted and duplicate-free.
class Snapshot {
public:
  Snapshot() = default;
  explicit Snapshot(std::vector<SetValue> states) : states_(canonical(std::move(states))) {}
  Snapshot(std::initializer_list<SetValue> states) : Snapshot(std::vector<SetValue>(states)) {}

  std::span<const SetValue> states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }
  bool empty() const noexcept { return states_.empty(); }
  bool contains(const SetValue& x) const;

  Snapshot with(std::span<const SetValue> extra) const;
  Snapshot intersect(const Snapshot& other) const;

  // "{c1,c2,...}"; parse_snapshot reads it back.
  std::string code() const;

  std::size_t count_in(const ClassSpec& a) const;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
  friend auto operator<=>(const Snapshot& a, const Snapshot& b) {
    return std::lexicographical_compare_three_way(a.states_.begin(), a.states_.end(),
                                                  b.states_.begin(), b.states_.end());
  }

private:
  std::vector<SetValue> states_;
};

Snapshot parse_snapshot(std::string_view text);

// |{s in T : theta(s) in A}|
std::size_t count_event(const RandomVariable& theta, const ClassSpec& a, const Snapshot& t);

// |{s in T : theta(s) in A}| / |T|. Throws EmptySnapshot.
Rational snapshot_prob(const RandomVariable& theta, const ClassSpec& a, const Snapshot& t);

// |{s in T : theta(s) in A and nu(s) in B}| / |T|. Throws EmptySnapshot.
Rational joint_snapshot_prob(const RandomVariable& theta, const ClassSpec& a,
                             const RandomVariable& nu, const ClassSpec& b, const Snapshot& t);

// Joint over the condition's probability. Throws EmptySnapshot or ConditionNull.
Rational conditional_snapshot_prob(const RandomVariable& theta, const ClassSpec& a,
                                   const RandomVariable& nu, const ClassSpec& b, const Snapshot& t);

} // namespace nap

#endif
