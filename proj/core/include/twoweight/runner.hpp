#pragma once

// Batch runs behind the command-line tool: configuration parsing, constant
// tables, the verification suite with frozen baselines, and report merging.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twoweight/constants.hpp"
#include "twoweight/scenario.hpp"
#include "twoweight/verify.hpp"

namespace tw {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBaseline = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitExactness = 3;

enum class OutputFormat { Json, Csv };
enum class SuiteKind { Default, Exactness, Baseline };

const char* to_string(SuiteKind k);
SuiteKind suite_kind_from_string(const std::string& s);

struct GeneratorSource {
  std::uint64_t seed = 1;
  GeneratorConfig config;
};

/// Exactly one of scenario, generator and suite is set.
struct RunConfig {
  std::optional<Scenario> scenario;
  std::optional<GeneratorSource> generator;
  std::optional<SuiteConfig> suite;

  PartitionStrategy partitions;
  SuiteKind suite_kind = SuiteKind::Default;
  GoodnessParams reversal = default_reversal_params();
  int lemma_trials = 4;
  std::uint64_t verify_seed = 7;
  /// Frozen baselines; empty means every baseline-tier budget is unbounded.
  std::string baselines;
  /// Per-check budget overrides, applied before baselines.
  std::map<std::string, double> budgets;

  std::string output_path;
  OutputFormat format = OutputFormat::Json;
  /// 0 selects default_workers().
  unsigned workers = 0;
  bool timing = false;

  void validate() const;
};

/// Parses and validates a configuration document. Throws ValidationError.
RunConfig parse_run_config(const std::string& text);
std::string run_config_to_json(const RunConfig& cfg);

/// The scenarios a configuration describes, in index order.
std::vector<Scenario> scenarios_of(const RunConfig& cfg);

struct ConstantsRun {
  std::vector<ConstantsReport> reports;
  std::string output;
};
ConstantsRun run_constants(const RunConfig& cfg);

/// Everything that a frozen baseline depends on, as canonical JSON.
std::string verify_parameters(const RunConfig& cfg);

struct Baseline {
  double value = 0.0;
  BoundKind kind = BoundKind::Upper;
};
struct Baselines {
  std::string parameters;
  std::map<std::string, Baseline> checks;
};
Baselines load_baselines(const std::string& path);
Baselines parse_baselines(const std::string& text);
std::string baselines_to_json(const std::string& parameters, const std::vector<CheckResult>& checks);

/// Budget for one check: override, else the exactness constant, else a
/// multiple of the frozen baseline when its parameters match, else unbounded.
/// Explains the choice in `note` when it is not the baseline.
double budget_for(const CheckSpec& spec, const RunConfig& cfg, const Baselines* baselines,
                  std::string& note);

struct VerifyRun {
  std::vector<CheckResult> checks;
  int exit_code = kExitOk;
  std::string output;
};
VerifyRun run_verify(const RunConfig& cfg);

/// Merges constants reports (scenarios concatenated) or verify reports
/// (checks folded by name). All inputs must be of one kind.
VerifyRun merge_reports(const std::vector<std::string>& texts, OutputFormat format);

/// A configuration document holding one generated scenario inline.
std::string generate_config(std::uint64_t seed, const GeneratorConfig& g);

}  // namespace tw
