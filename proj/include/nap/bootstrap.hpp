#ifndef NAP_BOOTSTRAP_HPP
#define NAP_BOOTSTRAP_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nap/constraint.hpp"
#include "nap/random_variable.hpp"
#include "nap/rational.hpp"
#include "nap/snapshot.hpp"

namespace nap {

/// Size cutoffs t_0 < t_1 < ...; tier(n) is the least i with n < t_i.
struct TierConfig {
  std::vector<std::size_t> thresholds;

  // Throws ValidationError unless t_0 >= 2 and the cutoffs increase.
  void validate() const;
  unsigned tier(std::size_t n) const;
  // Size bound of the snapshots of a window of size n: t_{tier(n)-1}.
  // Throws ValidationError for tier-0 windows.
  std::size_t alpha(std::size_t n) const;
};

using Mask = std::uint32_t;

/// A set of subsets of a window of at most 16 elements, one bit per subset mask.
class Family {
public:
  Family() = default;
  explicit Family(unsigned width);

  unsigned width() const noexcept { return width_; }
  bool test(Mask m) const { return (bits_[m >> 6] >> (m & 63)) & 1U; }
  void set(Mask m) { bits_[m >> 6] |= std::uint64_t{1} << (m & 63); }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<Mask> members() const;

  Family operator&(const Family& o) const;
  friend bool operator==(const Family&, const Family&) = default;

private:
  unsigned width_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Compresses the bits of `m` selected by `sub` (like the x86 pext).
Mask extract_bits(Mask m, Mask sub);

/// X_{S'} = { z & S' : z in X, |z & S'| < alpha }, re-indexed over S'.
/// `sub` is a mask within X's window.
Family restrict_constraint_set(const Family& x, Mask sub, std::size_t alpha);

struct LabeledFamily {
  std::string label;             // key of the originating constraint
  std::optional<Mask> bound_of;  // for SubsetBound members: their window (top-level mask)
  Family family;
};

/// A base restricted to a window (a mask of the top window).
struct RestrictedBase {
  Mask window = 0;
  std::size_t alpha = 0;
  std::vector<LabeledFamily> members;

  const LabeledFamily* find(const std::string& label) const;
};

struct PropertyAudit {
  bool fine = false, fip = false, ultra = false, non_principal = false, no_empty = false;
  std::vector<std::string> notes;
  bool all() const { return fine && fip && ultra && non_principal && no_empty; }
};

class TieredProb;

/// Value of Pr^X: a rational on tier-0 windows, otherwise a germ over the
/// smaller sub-snapshots of X.
class TieredGerm;
using TieredValue = std::variant<Rational, std::shared_ptr<const TieredGerm>>;

class TieredGerm {
public:
  TieredGerm(const TieredProb* tp, Mask event, Mask window) : tp_(tp), event_(event), window_(window) {}
  Mask window() const noexcept { return window_; }
  Mask event() const noexcept { return event_; }
  // Pr^Y(A & Y) for a sub-snapshot Y of the window with smaller tier.
  // Throws EmptySnapshot for Y empty, ValidationError for Y too large.
  TieredValue eval(Mask y) const;

private:
  const TieredProb* tp_;
  Mask event_;
  Mask window_;
};

struct CoherenceRecord {
  Mask x;
  Rational lhs, rhs;
  bool pass;
};

struct CoherenceReport {
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::vector<CoherenceRecord> records;  // leaf comparisons (first few kept)
  bool passed() const { return checked > 0 && failures == 0; }
};

struct CounterexampleReport {
  bool top_fip = false;                // the base passes budgeted FIP on the top window
  bool restriction_has_empty = false;  // restricting the index to tier 0 yields the empty set
  bool repaired = false;               // with SubsetBound, the window restriction passes all five checks
  bool small_choice_restricts = false; // adding the tier-0 family keeps the restriction proper
  bool big_choice_fails = false;       // adding its complement puts the empty set in the restriction
  std::vector<std::string> notes;
  bool demonstrated() const {
    return top_fip && restriction_has_empty && repaired && small_choice_restricts && big_choice_fails;
  }
};

/// Bootstrapped probabilities over a top window of at most 16 values.
class TieredProb {
public:
  TieredProb(std::vector<SetValue> top, TierConfig cfg, FilterBase base, Mode mode = Mode::Hf);

  const std::vector<SetValue>& top() const noexcept { return top_; }
  const TierConfig& config() const noexcept { return cfg_; }
  const FilterBase& base() const noexcept { return base_; }
  Mask full() const noexcept { return static_cast<Mask>((std::uint64_t{1} << top_.size()) - 1); }

  Mask mask_of(const std::vector<SetValue>& xs) const;
  Snapshot snapshot_of(Mask m) const;
  unsigned tier(Mask m) const;

  // The constraint's extension among the snapshots of the top window.
  Family family_of(const Constraint& c) const;
  RestrictedBase top_base() const;

  /// Restriction of `from` to the sub-window `sub` (a top-level mask inside
  /// from.window). Needs the SubsetBound member for `sub`; throws
  /// MissingSubsetBound otherwise.
  RestrictedBase restrict(const RestrictedBase& from, Mask sub) const;
  // Memoized restriction of the top base.
  const RestrictedBase& restrict_base(Mask sub) const;

  PropertyAudit audit(const RestrictedBase& rb, std::uint64_t seed = 0) const;

  TieredGerm tiered_prob(const ClassSpec& a, const RandomVariable& theta, Mask window) const;

  CoherenceReport coherence_check(const ClassSpec& a, Mask t, Mask s, std::size_t per_level = 6,
                                  std::uint64_t seed = 0) const;

private:
  std::vector<SetValue> top_;
  TierConfig cfg_;
  FilterBase base_;
  Mode mode_;
  mutable std::mutex memo_mutex_;
  mutable std::map<Mask, std::unique_ptr<RestrictedBase>> memo_;
};

/// Budgeted FIP of a restricted base: every choice of at most `k` members meets.
bool family_fip(const RestrictedBase& rb, std::size_t k = 3);

/// The base of fineness for the atoms plus "not tier 0", over a top window
/// of atoms sized to the tier config.
CounterexampleReport non_restriction_counterexample(const TierConfig& cfg);

/// Window-lattice base: Fineness(x) for every x of the top window and
/// SubsetBound(W, alpha(W)) for every listed window.
FilterBase bootstrap_base(const std::vector<SetValue>& top, const std::vector<Mask>& windows,
                          const TierConfig& cfg);

} // namespace nap

#endif
