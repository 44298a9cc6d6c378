// One line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>

#include "falsetheta/verify.hpp"

using namespace falsetheta;

int main() {
  std::vector<CriterionResult> first;
  CriterionResult det = verify_determinism(1, 4, &first);
  first.push_back(det);
  int failed = 0;
  for (const auto& r : first) {
    std::printf("[%s] %2d %s (%.1f s%s)\n", r.pass() ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.within_time() ? "" : ", over time limit");
    if (!r.pass()) {
      ++failed;
      std::fputs(r.report().c_str(), stdout);
    }
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(first.size()) - failed, first.size());
  return failed ? 1 : 0;
}
