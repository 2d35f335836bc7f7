#ifndef NAP_UNIVERSE_HPP
#define NAP_UNIVERSE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nap/set_value.hpp"

namespace nap {

enum class Mode { Hf, Ordinal };

std::string to_string(Mode mode);

/// Declared size of a class. Finite(n) < Tier(k) < ProperClass, and within
/// a kind by the parameter. Tier(k) is the desk stand-in for aleph_k.
class CardinalityTier {
public:
  enum class Kind : std::uint8_t { Finite, Tier, ProperClass };

  static constexpr CardinalityTier finite(std::uint64_t n) { return {Kind::Finite, n}; }
  static constexpr CardinalityTier tier(std::uint64_t k) { return {Kind::Tier, k}; }
  static constexpr CardinalityTier proper_class() { return {Kind::ProperClass, 0}; }

  constexpr Kind kind() const noexcept { return kind_; }
  constexpr std::uint64_t value() const noexcept { return value_; }
  constexpr bool is_infinite() const noexcept { return kind_ != Kind::Finite; }

  // Size of the power class: 2^n (saturating) for finite, next tier otherwise.
  CardinalityTier power() const noexcept;

  std::string to_string() const;

  friend constexpr auto operator<=>(const CardinalityTier&, const CardinalityTier&) = default;

private:
  constexpr CardinalityTier(Kind k, std::uint64_t v) : kind_(k), value_(v) {}
  Kind kind_;
  std::uint64_t value_;
};

/// An intensional class: a membership predicate plus an index-based
/// generator of distinct members.
///
/// The generator is stateless: element_at(i) returns the i-th member, or
/// nullopt once the class is exhausted (and for every larger index).
class ClassSpec {
public:
  using Predicate = std::function<bool(const SetValue&)>;
  using Generator = std::function<std::optional<SetValue>(std::uint64_t)>;

  ClassSpec(std::string name, Mode mode, Predicate contains, Generator generate,
            CardinalityTier tier);

  const std::string& name() const noexcept { return state_->name; }
  Mode mode() const noexcept { return state_->mode; }
  CardinalityTier tier() const noexcept { return state_->tier; }

  bool contains(const SetValue& x) const { return state_->contains(x); }
  std::optional<SetValue> element_at(std::uint64_t index) const { return state_->generate(index); }

  /// Up to `count` members that are not in `exclusions` and satisfy `filter`,
  /// scanning at most `scan_limit` indices.
  std::vector<SetValue> enumerate(std::span<const SetValue> exclusions, std::size_t count,
                                  const Predicate& filter = {},
                                  std::uint64_t scan_limit = 1U << 20) const;

  // Explicit member list, for classes given extensionally.
  const std::optional<std::vector<SetValue>>& extension() const noexcept {
    return state_->extension;
  }
  // For P(A): A.
  const std::shared_ptr<const ClassSpec>& power_base() const noexcept {
    return state_->power_base;
  }
  // Names of classes this one is declared to be included in.
  const std::vector<std::string>& supersets() const noexcept { return state_->supersets; }

  ClassSpec with_tier(CardinalityTier tier) const;
  ClassSpec with_name(std::string name) const;
  ClassSpec with_extension(std::vector<SetValue> members) const;
  ClassSpec with_power_base(std::shared_ptr<const ClassSpec> base) const;
  ClassSpec with_superset(std::string name) const;

private:
  struct State {
    std::string name;
    Mode mode;
    Predicate contains;
    Generator generate;
    CardinalityTier tier;
    std::optional<std::vector<SetValue>> extension;
    std::shared_ptr<const ClassSpec> power_base;
    std::vector<std::string> supersets;
  };
  std::shared_ptr<const State> state_;
  ClassSpec with(const std::function<void(State&)>& edit) const;
};

class Universe;

/// Desk-scale universe: hereditarily finite sets of rank < bound (Hf mode),
/// or ordinals below omega * bound together with atoms, finite sets of
/// ordinals, and intensional power-class members (Ordinal mode).
class Universe {
public:
  static constexpr unsigned kMaxHfBound = 8;
  static constexpr std::uint64_t kDefaultWindow = 48;

  // Throws BoundTooSmall (Hf < 3, Ordinal < 1) or BoundTooLarge.
  static Universe make(Mode mode, unsigned bound, std::uint64_t inspection_window = kDefaultWindow);

  Mode mode() const noexcept { return mode_; }
  unsigned bound() const noexcept { return bound_; }

  // Enumeration of V. Hf: Ackermann order over V_bound (capped at 2^64
  // indices). Ordinal: ordinals and atoms interleaved.
  std::optional<SetValue> element_at(std::uint64_t index) const;
  // Number of elements of V when it fits in 64 bits.
  std::optional<std::uint64_t> size() const;

  bool contains(const SetValue& x) const;
  // Throws WrongMode when x is not a value of this universe's mode.
  void require(const SetValue& x) const;

  /// Finite set of values on which class behaviour is inspected (used to
  /// decide inclusions between intensional classes).
  const std::vector<SetValue>& inspection_window() const { return *window_; }

  std::uint64_t window_width() const noexcept { return width_; }

  ClassSpec everything() const;          // V
  ClassSpec empty_class() const;         // the empty class
  ClassSpec ordinals() const;            // On
  ClassSpec even() const;                // b even in omega*a + b (limits are even)
  ClassSpec odd() const;
  ClassSpec limits() const;              // Lim
  ClassSpec successors() const;          // On minus Lim minus {0}
  ClassSpec atoms() const;
  ClassSpec non_ordinals() const;        // V minus On
  ClassSpec below(const SetValue& ordinal) const; // initial segment {beta < ordinal}
  ClassSpec rank_level(unsigned alpha) const;     // V_{alpha+1} minus V_alpha
  ClassSpec power_class(const ClassSpec& base) const;
  ClassSpec finite_subsets(const ClassSpec& base) const;
  // Members of an explicit finite set of values; name defaults to the code.
  ClassSpec explicit_class(std::vector<SetValue> members, std::string name = {}) const;
  // Members of the set x (Hf mode: x viewed as a class).
  ClassSpec members_of(const SetValue& x) const;

  ClassSpec complement(const ClassSpec& a) const;
  ClassSpec intersection(const ClassSpec& a, const ClassSpec& b) const;
  ClassSpec union_of(const ClassSpec& a, const ClassSpec& b) const;
  ClassSpec difference(const ClassSpec& a, const ClassSpec& b) const;

private:
  Universe(Mode mode, unsigned bound, std::uint64_t width);
  Mode mode_;
  unsigned bound_;
  std::uint64_t width_;
  std::shared_ptr<const std::vector<SetValue>> window_;
};

enum class BuiltinName { On, Even, Odd, Lim, RankLevel, PowerClass, FiniteSubsets };

/// Builds one of the named classes; `alpha` is used by RankLevel and `base`
/// by PowerClass / FiniteSubsets. Throws WrongMode on a mode mismatch.
ClassSpec builtin_class(const Universe& u, BuiltinName name, unsigned alpha = 0,
                        const ClassSpec* base = nullptr);

/// A (+) alpha = { gamma + alpha : gamma in A }.
ClassSpec translate_class(const Universe& u, const ClassSpec& a, const SetValue& alpha);

/// Inclusion A <= B: declared facts, explicit extensions, else checked on the
/// universe's inspection window.
bool class_included(const Universe& u, const ClassSpec& a, const ClassSpec& b);

/// Some member of `b` outside `a` and outside `exclusions`, if one is found.
std::optional<SetValue> find_separator(const ClassSpec& b, const ClassSpec& a,
                                       std::span<const SetValue> exclusions = {});

} // namespace nap

#endif
