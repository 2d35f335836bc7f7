#ifndef NAP_CONSTRAINT_HPP
#define NAP_CONSTRAINT_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nap/set_value.hpp"
#include "nap/snapshot.hpp"
#include "nap/universe.hpp"

namespace nap {

/// One member of a constraint family: a decidable set of snapshots.
///
///   Fineness(x)        x in T
///   Ratio(A,B,k)       B meets T and k*|A & T| <= |B & T|
///   OrderLt(A,B)       |A & T| <  |B & T|
///   OrderGe(A,B)       |A & T| >= |B & T|
///   Interval(l)        every ordinal of T lies in a run [b, b+n] inside T, n >= l
///   Weight(m)          m*|On & T| <= |T|, T nonempty
///   SubsetBound(W,a)   |T & W| < a
///   MinSize(t)         |T| >= t
///   MaxSize(t)         |T| <  t
///
/// Parametric constraints name a whole family (Fineness over every x, or
/// Ratio/Interval/Weight over every parameter value); they are not sets of
/// snapshots themselves and expand through instantiate().
class Constraint {
public:
  enum class Kind { Fineness, Ratio, OrderLt, OrderGe, Interval, Weight, SubsetBound, MinSize, MaxSize, Parametric };

  static Constraint fineness(SetValue x);
  static Constraint ratio(ClassSpec a, ClassSpec b, std::uint64_t k);
  static Constraint order_lt(ClassSpec a, ClassSpec b);
  static Constraint order_ge(ClassSpec a, ClassSpec b);
  static Constraint interval(std::uint64_t l);
  static Constraint weight(std::uint64_t m);
  static Constraint subset_bound(Snapshot window, std::uint64_t alpha);
  static Constraint min_size(std::uint64_t t);
  static Constraint max_size(std::uint64_t t);

  static Constraint all_fineness();
  static Constraint all_ratio(ClassSpec a, ClassSpec b);
  static Constraint all_interval();
  static Constraint all_weight();

  Kind kind() const noexcept { return s_->kind; }
  // For Parametric: the kind of the family members.
  Kind family() const noexcept { return s_->family; }
  bool is_parametric() const noexcept { return s_->kind == Kind::Parametric; }

  const std::string& key() const noexcept { return s_->key; }

  const SetValue& point() const { return *s_->point; }
  const ClassSpec& a() const { return *s_->a; }
  const ClassSpec& b() const { return *s_->b; }
  std::uint64_t param() const noexcept { return s_->param; }
  const Snapshot& window() const { return *s_->window; }

  bool has_classes() const noexcept { return s_->a.has_value(); }

  // Member of a parametric family at parameter n (the point for Fineness).
  Constraint instantiate(std::uint64_t n) const;
  Constraint instantiate_point(const SetValue& x) const;

  friend bool operator==(const Constraint& x, const Constraint& y) { return x.key() == y.key(); }

private:
  struct State {
    Kind kind;
    Kind family;
    std::string key;
    std::optional<SetValue> point;
    std::optional<ClassSpec> a, b;
    std::uint64_t param = 0;
    std::optional<Snapshot> window;
  };
  explicit Constraint(std::shared_ptr<const State> s) : s_(std::move(s)) {}
  static Constraint make(State s);
  std::shared_ptr<const State> s_;
};

/// Exact membership of T in c. Throws WrongMode for ordinal-only constraints
/// in an HF universe, ValidationError for parametric families.
bool constraint_membership(const Constraint& c, const Snapshot& t, Mode mode);

/// A finite set of constraints (parametric members stand for their whole
/// family), extended functionally.
class FilterBase {
public:
  FilterBase() = default;
  explicit FilterBase(std::vector<Constraint> constraints, std::string provenance = {});

  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  const std::string& provenance() const noexcept { return provenance_; }
  const std::vector<std::string>& notes() const noexcept { return notes_; }
  std::size_t size() const noexcept { return constraints_.size(); }

  bool contains(const Constraint& c) const;
  const Constraint* find(const std::string& key) const;

  FilterBase with(const Constraint& c) const;
  FilterBase with(const std::vector<Constraint>& cs) const;
  FilterBase with_note(std::string note) const;
  FilterBase with_provenance(std::string provenance) const;

  // One constraint key per line, preceded by "# provenance" and "# note" lines.
  std::string serialize() const;

private:
  std::vector<Constraint> constraints_;
  std::string provenance_;
  std::vector<std::string> notes_;
};

/// Parses one serialized constraint key; `resolve` maps class names to classes.
Constraint parse_constraint(const std::string& text,
                            const std::function<ClassSpec(const std::string&)>& resolve);

} // namespace nap

#endif
