#ifndef NAP_WITNESS_HPP
#define NAP_WITNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nap/constraint.hpp"
#include "nap/snapshot.hpp"
#include "nap/universe.hpp"

namespace nap {

/// Search limits shared by the witness builders, the FIP checker and the
/// verdict engine.
struct Budget {
  std::size_t max_subset = 3;        // check_fip: all subsets up to this size, plus the full set
  std::uint64_t parametric_value = 5; // k, l, m used when a parametric family is instantiated
  std::size_t fineness_samples = 3;  // points drawn for Fineness(*)
  std::size_t max_support = 20;      // exact subset search over at most this many free elements
  std::size_t repair_steps = 4096;
  std::uint64_t seed = 0;
  std::size_t samples = 16;          // evidence snapshots for Undetermined verdicts
};

struct RatioPair {
  ClassSpec a;
  ClassSpec b;
  std::uint64_t n;
};

/// F contains the pins and, for every pair, B meets F and n * |A & F| <= |B & F|
/// with n the largest n_j. Pairs are processed by increasing tier of A; each
/// adds n * |F & A_j| fresh members of B_j outside A_1..A_j.
/// Throws EnumerationExhausted when a class cannot supply enough members.
Snapshot superreg_witness(const Universe& u, const std::vector<SetValue>& pins,
                          std::vector<RatioPair> pairs);

/// F in every Fineness(pin), Ratio(A,B,k) (for the pairs), Interval(l) and
/// Weight(m): pins, then l-isolated blocks from each B, then the interval
/// closure alpha+1..alpha+l, then j*m non-ordinal pads.
/// Throws WrongMode outside ordinal universes, EnumerationExhausted.
Snapshot ordinal_witness(const Universe& u, const std::vector<SetValue>& pins, std::uint64_t k,
                         std::uint64_t l, std::uint64_t m, const std::vector<RatioPair>& pairs);

/// Extends F- so that the counts of the power classes named in `lifted`
/// (OrderLt/OrderGe constraints between power classes) satisfy them.
/// Strict steps get one more element than everything below; tied classes are
/// equalized. New elements avoid every class in `frozen`, so counts of those
/// classes are unchanged.
/// Throws MarkerMissing when a required separator does not exist,
/// EnumerationExhausted when no fresh member can be found.
Snapshot powerset_witness_extend(const Universe& u, const Snapshot& f_minus,
                                 const std::vector<Constraint>& lifted,
                                 const std::vector<ClassSpec>& frozen,
                                 std::size_t max_steps = 4096);

/// Depth of nested power classes: 0 for a plain class, 1 for P(A), ...
unsigned power_depth(const ClassSpec& c);

struct SolveResult {
  enum class Status { Found, Refuted, Unknown };
  Status status = Status::Unknown;
  std::optional<Snapshot> witness;
  std::string reason;
};

/// Looks for one snapshot in the intersection of `constraints` (parametric
/// members are instantiated from the budget). Refuted is only returned with
/// a proof: a syntactic contradiction or an exhausted exact search.
SolveResult solve_constraints(const Universe& u, const std::vector<Constraint>& constraints,
                              const Budget& budget);

/// Instantiates parametric members: Ratio/Interval/Weight at
/// budget.parametric_value, Fineness(*) at budget.fineness_samples points.
std::vector<Constraint> instantiate_all(const Universe& u, const std::vector<Constraint>& constraints,
                                        const Budget& budget);

bool satisfies_all(const Snapshot& t, const std::vector<Constraint>& constraints, Mode mode);

} // namespace nap

#endif
