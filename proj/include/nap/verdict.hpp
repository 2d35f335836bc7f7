#ifndef NAP_VERDICT_HPP
#define NAP_VERDICT_HPP

#include <optional>
#include <string>
#include <vector>

#include "nap/constraint.hpp"
#include "nap/germ.hpp"
#include "nap/witness.hpp"

namespace nap {

enum class Relation { Lt, Le, Eq };

std::string to_string(Relation r);
bool relation_holds(const Rational& a, Relation r, const Rational& b);

/// A pointwise claim: lhs rel rhs at every snapshot in the intersection of
/// `cited` (an empty list means every non-empty snapshot).
struct Obligation {
  Germ lhs;
  Relation rel;
  Germ rhs;
  std::vector<Constraint> cited;

  std::string text() const;
};

struct Evidence {
  Snapshot snapshot;
  std::optional<Rational> lhs, rhs;
};

struct Verdict {
  enum class Kind { Forced, ForcedNot, Undetermined };
  Kind kind = Kind::Undetermined;
  std::string rule;   // "structural", "R1".."R6", "none"
  std::string claim;  // the relation that was asked about
  std::vector<Constraint> cited;
  // What was actually established; re-checkable on witnesses of `cited`.
  std::vector<Obligation> obligations;
  std::vector<Evidence> evidence;
  std::string diagnostic;
};

std::string to_string(Verdict::Kind k);

/// g1 rel g2 relative to the base. Forced/ForcedNot only through the rule
/// table; otherwise Undetermined with sampled evidence.
Verdict compare(const Universe& u, const Germ& g1, Relation rel, const Germ& g2, const FilterBase& fb,
                const Budget& budget = {});

enum class Infinitesimal { ApproxZero, NotApproxZero, Undetermined };

std::string to_string(Infinitesimal i);

struct Classification {
  Infinitesimal kind = Infinitesimal::Undetermined;
  std::string rule;
  std::vector<Constraint> family;       // parametric members used
  std::vector<Obligation> obligations;  // sample instances of the bound
};

/// Decided from parametric families in the base, never from sampling.
Classification classify_infinitesimal(const Universe& u, const Germ& g, const FilterBase& fb,
                                      const Budget& budget = {});

/// Forced iff g1/g2 is infinitesimal under the base.
Verdict much_less(const Universe& u, const Germ& g1, const Germ& g2, const FilterBase& fb,
                  const Budget& budget = {});

struct AuditResult {
  std::size_t witnesses = 0;
  std::size_t refutations = 0;
  std::size_t unavailable = 0;
  std::vector<std::string> failures;
  bool ok(std::size_t wanted) const { return refutations == 0 && witnesses >= wanted; }
};

/// Evaluates the obligation on `count` fresh witnesses of its cited
/// constraints (randomly pinned, seeded).
AuditResult audit_obligation(const Universe& u, const Obligation& ob, std::size_t count, std::uint64_t seed);

AuditResult audit_verdict(const Universe& u, const Verdict& v, std::size_t count, std::uint64_t seed);

} // namespace nap

#endif
