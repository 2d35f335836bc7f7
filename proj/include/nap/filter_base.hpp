#ifndef NAP_FILTER_BASE_HPP
#define NAP_FILTER_BASE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nap/constraint.hpp"
#include "nap/witness.hpp"

namespace nap {

struct FipResult {
  enum class Status { Witnessed, Refuted, Unknown };
  Status status = Status::Unknown;
  // Witnessed: one common snapshot per checked subset (keys of its members).
  std::vector<std::pair<std::vector<std::string>, Snapshot>> witnesses;
  // Refuted / Unknown: the offending subset and the reason.
  std::vector<std::string> subset;
  std::string reason;
  std::size_t subsets_checked = 0;
};

std::string to_string(FipResult::Status s);

/// Checks every subset of size <= budget.max_subset plus the full set. A
/// lifted judgement between power classes brings its base-level counterpart
/// along when the base holds one.
FipResult check_fip(const Universe& u, const FilterBase& fb, const Budget& budget = {});

/// {Fineness(x) : x in V} as one parametric member.
FilterBase fineness_base();

/// The judgement between P(A) and P(B) matching one between A and B.
Constraint lift(const Universe& u, const Constraint& c);

struct StageResult {
  FilterBase base;
  // For each pair, "Lt" or "Ge".
  std::vector<std::string> choices;
};

/// One successor stage: for each pair (A,B) in order, keep OrderLt(A,B) when
/// the base stays FIP-compatible, else OrderGe(A,B); then add the lifted
/// judgements on power classes.
StageResult powerset_prefilter_stage(const Universe& u, unsigned level, const FilterBase& prior,
                                     const std::vector<std::pair<SetValue, SetValue>>& pairs,
                                     const Budget& budget = {});

/// `count` distinct pairs of members of V_{level+1} minus V_level, chosen by seed.
std::vector<std::pair<SetValue, SetValue>> level_pairs(const Universe& u, unsigned level,
                                                       std::size_t count, std::uint64_t seed);

/// P^n(A).
ClassSpec iterated_power(const Universe& u, const ClassSpec& a, unsigned n);

} // namespace nap

#endif
