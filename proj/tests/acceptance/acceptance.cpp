// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            all eleven criteria (desk-scale training included)
//   acceptance --fast     criteria 1-6 only
//   acceptance --out DIR  keep the metrics and sweep CSVs of criteria 7-10
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "skyris/harness/criteria.hpp"

using namespace skyris::harness;

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  bool fast = false;
  TrainingCriteriaOptions opt;
  app.add_flag("--fast", fast, "skip the training criteria");
  app.add_option("--out", opt.out_dir, "directory for training and sweep CSVs");
  app.add_option("--seeds", opt.seeds, "seeds for the training criteria");
  app.add_option("--eval-episodes", opt.eval_episodes, "evaluation episodes per sweep cell");
  app.add_flag("-v,--verbose", opt.verbose, "per-seed progress on stderr");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  auto report = [&](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  };
  report(check_link_oracles());
  report(check_bessel_half_power());
  report(check_feasibility_by_construction());
  report(check_gradients());
  report(check_trpo_trust_region());
  report(check_td3_mechanics());
  if (!fast)
    for (const auto& r : run_training_criteria(opt)) report(r);
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
