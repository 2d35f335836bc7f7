#ifndef NAP_AUDIT_HPP
#define NAP_AUDIT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nap/universe.hpp"
#include "nap/verdict.hpp"

namespace nap {

struct AuditOptions {
  std::uint64_t seed = 20240601;
  // Multiplies the case counts of criteria 1-3, 5 and 7; the time limits stay fixed.
  double budget = 1.0;
  std::size_t soundness_witnesses = 100;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  std::string line() const;  // "PASS 3 perfect-additivity: ..."
};

/// Forced verdicts emitted while running criteria 1-9, replayed by criterion 10.
struct VerdictLog {
  struct Entry {
    int criterion;
    Universe universe;
    Verdict verdict;
  };
  std::vector<Entry> entries;
  void add(int criterion, const Universe& u, const Verdict& v);
};

CriterionResult criterion_field_laws(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_euclidean(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_perfect_additivity(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_symmetry_failures(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_superregularity(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_powerset(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_ordinal(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_restriction(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_counterexample(const AuditOptions& o, VerdictLog& log);
CriterionResult criterion_soundness(const AuditOptions& o, const VerdictLog& log);

/// Runs 1..10 in order; `report` is called after each criterion.
std::vector<CriterionResult> run_acceptance(const AuditOptions& o,
                                            const std::function<void(const CriterionResult&)>& report = {});

} // namespace nap

#endif
