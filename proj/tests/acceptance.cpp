#include <cstdio>

#include "newform/suite.hpp"

using namespace newform;

int main() {
  SuiteOptions opt;
  int failures = 0;
  for (const auto& r : run_suite(opt)) {
    std::printf("%s criterion %d: %s -- %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.summary.c_str(), r.seconds);
    if (!r.pass) ++failures;
  }
  std::fflush(stdout);
  return failures ? 1 : 0;
}
