#pragma once

#include <functional>
#include <string>
#include <vector>

namespace edlab::acceptance {

enum class Suite { Fast, Full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // "; "-separated sub-check summaries, failures first
  double seconds = 0.0;
};

// Fast: 1-6, 10, 11. Full: 1-12.
std::vector<int> suite_ids(Suite suite);
std::string criterion_name(int id);

// Throws DomainError for ids outside 1..12. Exceptions raised while a
// criterion runs are reported as a failure of that criterion.
CriterionResult run_criterion(int id);

// Runs the suite in id order, calling `on_result` after each criterion.
std::vector<CriterionResult> run_suite(Suite suite,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS  3  double-slit minima  (1.2 s)  detail"
std::string format_result(const CriterionResult& r);

}  // namespace edlab::acceptance
