#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace skyris::harness {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// One line: "PASS  3  feasibility-by-construction  <detail>  (0.4 s)".
std::string format_result(const CriterionResult& r);

// Deterministic math and mechanics (criteria 1-6); a few seconds in total.
CriterionResult check_link_oracles();
CriterionResult check_bessel_half_power();
CriterionResult check_feasibility_by_construction();
CriterionResult check_gradients();
CriterionResult check_trpo_trust_region();
CriterionResult check_td3_mechanics();
std::vector<CriterionResult> run_fast_criteria();

struct TrainingCriteriaOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int episodes = 0;       // 0 keeps the desk default
  int eval_episodes = 10;
  std::string out_dir;    // sweep and metrics CSVs land here when non-empty
  bool verbose = false;
};

// Desk-scale training runs (criteria 7-11).
std::vector<CriterionResult> run_training_criteria(const TrainingCriteriaOptions& opt);

}  // namespace skyris::harness
