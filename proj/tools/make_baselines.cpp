// Oracle run that freezes the baseline-tier constants.
//
//   make_baselines [output.json]
//
// Runs the default 50-scenario suite with no budgets (every baseline-tier
// check unbounded), then writes each check's empirical constant together with
// the parameters it was measured under. run_verify only applies a baseline
// when the run's parameters match exactly.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "twoweight/runner.hpp"

int main(int argc, char** argv) {
  tw::RunConfig cfg;
  cfg.suite = tw::SuiteConfig{};
  const auto run = tw::run_verify(cfg);
  for (const auto& c : run.checks)
    std::fprintf(stderr, "%-30s %-6s %.17g  (%zu/%zu non-degenerate scenarios, %zu samples)\n", c.name.c_str(),
                 tw::to_string(c.kind), c.empirical_constant, c.nondegenerate_scenarios,
                 c.scenarios - c.skipped, c.samples);
  const std::string text = tw::baselines_to_json(tw::verify_parameters(cfg), run.checks);
  if (argc > 1) {
    std::ofstream out(argv[1], std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << argv[1] << "\n";
      return 2;
    }
    out << text;
  } else {
    std::cout << text;
  }
  return run.exit_code == tw::kExitExactness ? 3 : 0;
}
