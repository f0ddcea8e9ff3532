#pragma once

// The acceptance suite: ten numbered criteria, each self-contained.

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "henon/bifurcation.hpp"

namespace henon {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string target;
  double measured = 0;
  double tolerance = 0;
  bool pass = false;
  double runtime_s = 0;
  std::string details;
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;
  bool overall_pass = false;  ///< every listed criterion passed
  double runtime_s = 0;
};

struct VerifyOptions {
  std::vector<int> only;  ///< empty: all ten
  int jobs = 1;
  std::shared_ptr<ProfileStore> store;  ///< optional persistent profile cache
};

inline constexpr int criterion_count = 10;
inline constexpr double suite_budget_s = 900.0;

/// Throws DomainError for an id outside 1..10.
CriterionResult run_criterion(int id, const VerifyOptions& options = {});

VerifyReport run_verify(const VerifyOptions& options = {},
                        const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_criterion_line(const CriterionResult& result);

std::string report_to_json(const VerifyReport& report);
/// Throws DomainError on malformed input.
VerifyReport report_from_json(std::string_view text);

}  // namespace henon
