// Thin driver so ctest can run acceptance criteria individually: with an
// argument it runs that single criterion, without one it runs the full suite.
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "selftest_suite.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 20260819;
  if (argc > 2) seed = std::strtoull(argv[2], nullptr, 10);
  if (argc > 1) {
    int id = std::atoi(argv[1]);
    if (id < 1 || id > circleflow::selftest::criterion_count()) {
      std::cerr << "criterion id out of range: " << argv[1] << "\n";
      return 2;
    }
    auto r = circleflow::selftest::run_criterion(id, seed);
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": "
              << r.name << " (" << r.detail << ")\n";
    return r.passed ? 0 : 1;
  }
  int failed = circleflow::selftest::run_acceptance(seed, std::cout);
  return failed == 0 ? 0 : 1;
}
