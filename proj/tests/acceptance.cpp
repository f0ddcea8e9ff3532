#include <cstdio>

#include "henon/verify.hpp"

int main() {
  henon::VerifyOptions opt;
  const auto report = henon::run_verify(opt, [](const henon::CriterionResult& c) {
    std::printf("%s\n", henon::format_criterion_line(c).c_str());
    std::printf("      target: %s\n      %s\n", c.target.c_str(), c.details.c_str());
    std::fflush(stdout);
  });
  const bool in_budget = report.runtime_s <= henon::suite_budget_s;
  std::printf("[%s] suite runtime %.2f s (budget %.0f s)\n", in_budget ? "PASS" : "FAIL", report.runtime_s,
              henon::suite_budget_s);
  std::printf("%s\n", report.overall_pass && in_budget ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED");
  return report.overall_pass && in_budget ? 0 : 1;
}
