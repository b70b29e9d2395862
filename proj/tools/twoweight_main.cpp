// twoweight: generate scenarios, compute constants, run the verification
// suite, merge reports.
//
// Exit codes: 0 success, 1 baseline-tier failure, 2 invalid input,
// 3 exactness-tier failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twoweight/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tw::ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tw::ValidationError("cannot write '" + path + "'");
  out << text;
}

int fail_invalid(const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = "validation";
  j["message"] = message;
  std::cerr << j.dump() << "\n";
  return tw::kExitInvalid;
}

tw::OutputFormat format_of(const std::string& s) {
  if (s == "json") return tw::OutputFormat::Json;
  if (s == "csv") return tw::OutputFormat::Csv;
  throw tw::ValidationError("--format: expected json or csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-weight norm inequality constants and checks for fractional Riesz transforms"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  tw::GeneratorConfig gen;
  std::string line = "omega";
  std::string out_path;
  auto* generate = app.add_subcommand("generate", "Write a configuration holding one seeded scenario");
  generate->add_option("--seed", seed, "Scenario seed");
  generate->add_option("--n", gen.n, "Dimension");
  generate->add_option("--alpha", gen.alpha, "Fractional order in [0, n)");
  generate->add_option("--atoms-sigma", gen.atoms_sigma, "Number of sigma atoms");
  generate->add_option("--atoms-omega", gen.atoms_omega, "Number of omega atoms");
  generate->add_option("--line", line, "Measure on the x1-axis: sigma, omega, both or none");
  generate->add_option("--level-max", gen.level_max, "Finest grid level");
  generate->add_option("--out", out_path, "Output file (default stdout)");

  std::string config_path;
  std::string format;
  std::string suite;
  std::string baselines;
  unsigned workers = 0;
  bool timing = false;
  auto* constants = app.add_subcommand("constants", "Compute every constant with its witness");
  constants->add_option("--config", config_path, "Configuration file, or - for stdin")->required();
  constants->add_option("--format", format, "json or csv (overrides the config)");
  constants->add_option("--out", out_path, "Output file (overrides the config)");
  constants->add_option("--workers", workers, "Worker threads (default $TWOWEIGHT_WORKERS or 1)");
  constants->add_flag("--timing", timing, "Report wall-clock runtimes (output no longer byte-stable)");

  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  verify->add_option("--config", config_path,
                     "Configuration file, or - for stdin (default: the 50-scenario suite)");
  verify->add_option("--suite", suite, "default, exactness or baseline");
  verify->add_option("--baselines", baselines, "Frozen baseline file");
  verify->add_option("--format", format, "json or csv (overrides the config)");
  verify->add_option("--out", out_path, "Output file (overrides the config)");
  verify->add_option("--workers", workers, "Worker threads (default $TWOWEIGHT_WORKERS or 1)");

  std::vector<std::string> merge;
  auto* report = app.add_subcommand("report", "Merge reports of one kind");
  report->add_option("--merge", merge, "Reports to merge")->required()->expected(1, -1);
  report->add_option("--format", format, "json or csv");
  report->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return tw::kExitInvalid;
  }

  try {
    if (*generate) {
      gen.on_line = tw::line_role_from_string(line);
      emit(tw::generate_config(seed, gen), out_path);
      return tw::kExitOk;
    }

    if (*report) {
      std::vector<std::string> texts;
      for (const auto& p : merge) texts.push_back(slurp(p));
      const auto run = tw::merge_reports(texts, format_of(format.empty() ? "json" : format));
      emit(run.output, out_path);
      return run.exit_code;
    }

    tw::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = tw::parse_run_config(slurp(config_path));
    } else {
      cfg.suite = tw::SuiteConfig{};
    }
    if (!format.empty()) cfg.format = format_of(format);
    if (!out_path.empty()) cfg.output_path = out_path;
    if (workers) cfg.workers = workers;

    if (*constants) {
      if (timing) cfg.timing = true;
      const auto run = tw::run_constants(cfg);
      emit(run.output, cfg.output_path);
      return tw::kExitOk;
    }

    if (!suite.empty()) cfg.suite_kind = tw::suite_kind_from_string(suite);
    if (!baselines.empty()) {
      cfg.baselines = baselines;
    } else if (cfg.baselines.empty() && std::filesystem::exists(TWOWEIGHT_DEFAULT_BASELINES)) {
      cfg.baselines = TWOWEIGHT_DEFAULT_BASELINES;
    }
    const auto run = tw::run_verify(cfg);
    emit(run.output, cfg.output_path);
    for (const auto& c : run.checks)
      std::fprintf(stderr, "%-30s %-9s %s\n", c.name.c_str(), tw::to_string(c.tier),
                   !c.asserted ? "report" : c.pass ? "pass" : "FAIL");
    return run.exit_code;
  } catch (const tw::ValidationError& e) {
    return fail_invalid(e.what());
  } catch (const std::exception& e) {
    return fail_invalid(e.what());
  }
}
