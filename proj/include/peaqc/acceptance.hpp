#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace peaqc {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  double seconds;
  double budget_seconds;
  std::vector<std::string> checks;  ///< "label: value [ok|FAIL]"
};

struct AcceptanceOptions {
  std::set<int> only;  ///< empty runs all eight
  int workers = 1;
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// One line: "[PASS] 3 high-Fock scheme (1.2 s / 30 s): check; check; ...".
std::string format_result(const CriterionResult& r);

}  // namespace peaqc
