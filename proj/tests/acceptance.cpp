#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>

#include "nap/audit.hpp"

int main(int argc, char** argv) {
  nap::AuditOptions o;
  if (argc > 1) o.seed = std::stoull(argv[1]);
  auto results = nap::run_acceptance(o, [](const nap::CriterionResult& r) { std::cout << r.line() << std::endl; });
  bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
