// Acceptance suite: one checkable criterion per numbered entry, shared by the
// CLI selftest subcommand and the test harness.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace circleflow::selftest {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

int criterion_count();

// Runs one criterion (1-based id). The seed drives the randomized suites.
CriterionResult run_criterion(int id, std::uint64_t seed);

// Runs every criterion, prints one PASS/FAIL line each plus a summary to out,
// and returns the number of failed criteria.
int run_acceptance(std::uint64_t seed, std::ostream& out);

}  // namespace circleflow::selftest
