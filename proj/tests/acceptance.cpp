// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance [--quick]

#include <cstring>
#include <iostream>

#include "fishschool/verify.hpp"

int main(int argc, char** argv) {
  fishschool::VerifyOptions options;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--quick") == 0) options.scale = fishschool::VerifyScale::quick;
  }
  int failed = 0;
  for (const auto& r : fishschool::run_acceptance(options)) {
    std::cout << fishschool::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << failed << " criteria failed" << std::endl;
  return failed == 0 ? 0 : 1;
}
