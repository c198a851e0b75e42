// Runs every acceptance criterion and prints one line per criterion.
// Optional arguments restrict the run to the given criterion ids.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "edlab/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace edlab::acceptance;
  int failed = 0;
  auto report = [&](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  };
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) report(run_criterion(std::atoi(argv[i])));
  } else {
    run_suite(Suite::Full, report);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
