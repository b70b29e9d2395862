#include "twoweight/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json_io.hpp"
#include "twoweight/serialize.hpp"

namespace tw {

using json_io::Json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool known_check(const std::string& name) {
  const auto& cat = check_catalog();
  return std::any_of(cat.begin(), cat.end(), [&](const CheckSpec& c) { return c.name == name; });
}

Json source_json(const RunConfig& cfg) {
  Json o = Json::object();
  if (cfg.scenario) {
    o["scenario"] = json_io::to_json(*cfg.scenario);
  } else if (cfg.generator) {
    Json g = Json::object();
    g["seed"] = cfg.generator->seed;
    const Json config = json_io::to_json(cfg.generator->config);
    for (const auto& [k, v] : config.items()) g[k] = v;
    o["generator"] = std::move(g);
  } else if (cfg.suite) {
    o["suite"] = json_io::to_json(*cfg.suite);
  }
  return o;
}

Json verify_parameters_json(const RunConfig& cfg) {
  Json o = source_json(cfg);
  o["partitions"] = json_io::to_json(cfg.partitions);
  o["reversal"] = json_io::to_json(cfg.reversal);
  o["lemma_trials"] = cfg.lemma_trials;
  o["seed"] = cfg.verify_seed;
  return o;
}

unsigned workers_of(const RunConfig& cfg) { return cfg.workers ? cfg.workers : default_workers(); }

int exit_code_of(const std::vector<CheckResult>& checks) {
  int code = kExitOk;
  for (const CheckResult& c : checks) {
    if (!c.asserted || c.pass) continue;
    if (c.tier == Tier::Exactness) return kExitExactness;
    code = kExitBaseline;
  }
  return code;
}

std::string verify_output(const std::vector<CheckResult>& checks, int exit_code, const Json& header,
                          OutputFormat format) {
  if (format == OutputFormat::Csv) return checks_to_csv(checks);
  Json o = Json::object();
  o["schema_version"] = kSchemaVersion;
  o["kind"] = "verify";
  for (auto& [k, v] : header.items()) o[k] = v;
  o["exit_code"] = exit_code;
  Json arr = Json::array();
  for (const CheckResult& c : checks) arr.push_back(json_io::to_json(c));
  o["checks"] = std::move(arr);
  return json_io::dump(o);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const char* to_string(SuiteKind k) {
  switch (k) {
    case SuiteKind::Default: return "default";
    case SuiteKind::Exactness: return "exactness";
    case SuiteKind::Baseline: return "baseline";
  }
  return "default";
}

SuiteKind suite_kind_from_string(const std::string& s) {
  if (s == "default") return SuiteKind::Default;
  if (s == "exactness") return SuiteKind::Exactness;
  if (s == "baseline") return SuiteKind::Baseline;
  throw ValidationError("unknown suite '" + s + "' (expected default, exactness or baseline)");
}

void RunConfig::validate() const {
  const int sources = int(scenario.has_value()) + int(generator.has_value()) + int(suite.has_value());
  if (sources != 1) throw ValidationError("config: exactly one of scenario, generator, suite is required");
  if (scenario) scenario->validate();
  if (generator) generator->config.validate();
  if (suite) suite->validate();
  partitions.validate();
  reversal.validate();
  if (lemma_trials < 1) throw ValidationError("config: verify.lemma_trials must be >= 1");
  for (const auto& [name, v] : budgets) {
    if (!known_check(name)) throw ValidationError("config: verify.budgets." + name + ": unknown check");
    if (std::isnan(v)) throw ValidationError("config: verify.budgets." + name + ": NaN budget");
  }
}

RunConfig parse_run_config(const std::string& text) {
  const Json j = json_io::parse(text, "config");
  json_io::require_object(
      j, {"schema_version", "scenario", "generator", "suite", "partitions", "verify", "output", "workers", "timing"},
      "");
  if (!j.contains("schema_version")) throw ValidationError("schema_version: missing");
  int version = 0;
  json_io::read(j, "schema_version", version, "");
  if (version != kSchemaVersion)
    throw ValidationError("schema_version: unsupported version " + std::to_string(version));

  RunConfig cfg;
  if (j.contains("scenario")) cfg.scenario = json_io::scenario_from(j["scenario"], "scenario");
  if (j.contains("generator")) {
    Json g = j["generator"];
    if (!g.is_object()) throw ValidationError("generator: expected an object");
    GeneratorSource src;
    json_io::read(g, "seed", src.seed, "generator");
    g.erase("seed");
    src.config = json_io::generator_from(g, "generator");
    cfg.generator = std::move(src);
  }
  if (j.contains("suite")) cfg.suite = json_io::suite_from(j["suite"], "suite");
  if (j.contains("partitions")) cfg.partitions = json_io::partitions_from(j["partitions"], "partitions");
  if (j.contains("verify")) {
    const Json& v = j["verify"];
    json_io::require_object(v, {"suite", "seed", "lemma_trials", "reversal", "baselines", "budgets"}, "verify");
    std::string kind = to_string(cfg.suite_kind);
    json_io::read(v, "suite", kind, "verify");
    cfg.suite_kind = suite_kind_from_string(kind);
    json_io::read(v, "seed", cfg.verify_seed, "verify");
    json_io::read(v, "lemma_trials", cfg.lemma_trials, "verify");
    if (v.contains("reversal")) cfg.reversal = json_io::goodness_from(v["reversal"], cfg.reversal, "verify.reversal");
    json_io::read(v, "baselines", cfg.baselines, "verify");
    if (v.contains("budgets")) {
      if (!v["budgets"].is_object()) throw ValidationError("verify.budgets: expected an object");
      for (auto& [k, b] : v["budgets"].items()) cfg.budgets[k] = json_io::as_real(b, "verify.budgets." + k);
    }
  }
  if (j.contains("output")) {
    const Json& o = j["output"];
    json_io::require_object(o, {"path", "format"}, "output");
    json_io::read(o, "path", cfg.output_path, "output");
    std::string fmt = "json";
    json_io::read(o, "format", fmt, "output");
    if (fmt == "json") cfg.format = OutputFormat::Json;
    else if (fmt == "csv") cfg.format = OutputFormat::Csv;
    else throw ValidationError("output.format: expected json or csv");
  }
  int workers = 0;
  json_io::read(j, "workers", workers, "");
  if (workers < 0) throw ValidationError("workers: must be >= 0");
  cfg.workers = static_cast<unsigned>(workers);
  json_io::read(j, "timing", cfg.timing, "");
  cfg.validate();
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  Json o = Json::object();
  o["schema_version"] = kSchemaVersion;
  const Json source = source_json(cfg);
  for (const auto& [k, v] : source.items()) o[k] = v;
  o["partitions"] = json_io::to_json(cfg.partitions);
  Json v = Json::object();
  v["suite"] = to_string(cfg.suite_kind);
  v["seed"] = cfg.verify_seed;
  v["lemma_trials"] = cfg.lemma_trials;
  v["reversal"] = json_io::to_json(cfg.reversal);
  if (!cfg.baselines.empty()) v["baselines"] = cfg.baselines;
  if (!cfg.budgets.empty()) {
    Json b = Json::object();
    for (const auto& [k, x] : cfg.budgets) b[k] = json_io::real(x);
    v["budgets"] = std::move(b);
  }
  o["verify"] = std::move(v);
  Json out = Json::object();
  if (!cfg.output_path.empty()) out["path"] = cfg.output_path;
  out["format"] = cfg.format == OutputFormat::Json ? "json" : "csv";
  o["output"] = std::move(out);
  o["workers"] = cfg.workers;
  o["timing"] = cfg.timing;
  return json_io::dump(o);
}

std::vector<Scenario> scenarios_of(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.scenario) return {*cfg.scenario};
  if (cfg.generator) return {generate_scenario(cfg.generator->seed, cfg.generator->config)};
  return generate_suite(*cfg.suite);
}

ConstantsRun run_constants(const RunConfig& cfg) {
  const auto scenarios = scenarios_of(cfg);
  const unsigned workers = workers_of(cfg);
  ConstantsRun run;
  run.reports.resize(scenarios.size());
  ConstantsOptions opt;
  opt.partitions = cfg.partitions;
  opt.timing = cfg.timing;
  if (scenarios.size() == 1) {
    opt.workers = workers;
    run.reports[0] = compute_constants(scenarios[0], opt);
  } else {
    opt.workers = 1;
    parallel_for(scenarios.size(), workers,
                 [&](std::size_t i) { run.reports[i] = compute_constants(scenarios[i], opt); });
  }
  run.output = cfg.format == OutputFormat::Csv ? constants_to_csv(run.reports) : constants_to_json(run.reports);
  return run;
}

std::string verify_parameters(const RunConfig& cfg) { return json_io::dump(verify_parameters_json(cfg)); }

Baselines parse_baselines(const std::string& text) {
  const Json j = json_io::parse(text, "baselines");
  json_io::require_object(j, {"schema_version", "parameters", "checks"}, "baselines");
  int version = 0;
  json_io::read(j, "schema_version", version, "baselines");
  if (version != kSchemaVersion) throw ValidationError("baselines.schema_version: unsupported version");
  if (!j.contains("parameters") || !j.contains("checks") || !j["checks"].is_object())
    throw ValidationError("baselines: needs parameters and checks");
  Baselines b;
  b.parameters = json_io::dump(j["parameters"]);
  for (auto& [name, e] : j["checks"].items()) {
    const std::string ctx = "baselines.checks." + name;
    if (!known_check(name)) throw ValidationError(ctx + ": unknown check");
    json_io::require_object(e, {"value", "kind"}, ctx);
    Baseline x;
    json_io::read(e, "value", x.value, ctx);
    std::string kind = "upper";
    json_io::read(e, "kind", kind, ctx);
    if (kind == "upper") x.kind = BoundKind::Upper;
    else if (kind == "lower") x.kind = BoundKind::Lower;
    else throw ValidationError(ctx + ".kind: expected upper or lower");
    b.checks[name] = x;
  }
  return b;
}

Baselines load_baselines(const std::string& path) { return parse_baselines(read_file(path)); }

std::string baselines_to_json(const std::string& parameters, const std::vector<CheckResult>& checks) {
  Json o = Json::object();
  o["schema_version"] = kSchemaVersion;
  o["parameters"] = json_io::parse(parameters, "parameters");
  Json c = Json::object();
  for (const CheckResult& r : checks) {
    if (r.tier != Tier::Baseline || r.nondegenerate_scenarios == 0) continue;
    Json e = Json::object();
    e["value"] = json_io::real(r.empirical_constant);
    e["kind"] = to_string(r.kind);
    c[r.name] = std::move(e);
  }
  o["checks"] = std::move(c);
  return json_io::dump(o);
}

double budget_for(const CheckSpec& spec, const RunConfig& cfg, const Baselines* baselines,
                  std::string& note) {
  const double unbounded = spec.kind == BoundKind::Upper ? kInf : 0.0;
  if (auto it = cfg.budgets.find(spec.name); it != cfg.budgets.end()) {
    note = "budget overridden by configuration";
    return it->second;
  }
  if (spec.tier == Tier::Report) return unbounded;
  if (spec.name == "testing_vs_norm") return 1.0 + 1e-9;
  if (spec.name == "zero_operator") return 1e-15;
  if (!baselines) {
    note = "no frozen baseline; budget unbounded";
    return unbounded;
  }
  if (baselines->parameters != verify_parameters(cfg)) {
    note = "baseline parameters differ from this run; budget unbounded";
    return unbounded;
  }
  const auto it = baselines->checks.find(spec.name);
  if (it == baselines->checks.end() || it->second.kind != spec.kind) {
    note = "check missing from the baseline file; budget unbounded";
    return unbounded;
  }
  const double v = it->second.value;
  if (spec.name == "shadow_bound" || spec.name == "shadow_partition_spread") return v * (1.0 + 1e-12);
  return spec.kind == BoundKind::Upper ? 1.5 * v : v / 1.5;
}

VerifyRun run_verify(const RunConfig& cfg) {
  const auto scenarios = scenarios_of(cfg);
  std::optional<Baselines> baselines;
  if (!cfg.baselines.empty()) baselines = load_baselines(cfg.baselines);

  VerifyOptions opt;
  opt.partitions = cfg.partitions;
  opt.reversal = cfg.reversal;
  opt.lemma_trials = cfg.lemma_trials;
  opt.seed = cfg.verify_seed;
  opt.exactness = cfg.suite_kind != SuiteKind::Baseline;
  opt.baseline = cfg.suite_kind != SuiteKind::Exactness;

  std::vector<std::map<std::string, Measurement>> per(scenarios.size());
  parallel_for(scenarios.size(), workers_of(cfg),
               [&](std::size_t i) { per[i] = measure_scenario(scenarios[i], i, opt); });

  VerifyRun run;
  for (const CheckSpec& spec : check_catalog()) {
    std::vector<Measurement> ms;
    for (const auto& m : per)
      if (auto it = m.find(spec.name); it != m.end()) ms.push_back(it->second);
    if (ms.empty() && (!per.empty() || (spec.tier == Tier::Exactness ? !opt.exactness : !opt.baseline)))
      continue;
    CheckResult r = aggregate(spec, ms);
    std::string note;
    const double budget = budget_for(spec, cfg, baselines ? &*baselines : nullptr, note);
    judge(r, budget);
    if (!note.empty()) r.note = r.note.empty() ? note : r.note + "; " + note;
    run.checks.push_back(std::move(r));
  }
  run.exit_code = exit_code_of(run.checks);
  Json header = Json::object();
  header["suite"] = to_string(cfg.suite_kind);
  header["scenarios"] = scenarios.size();
  header["parameters"] = verify_parameters_json(cfg);
  run.output = verify_output(run.checks, run.exit_code, header, cfg.format);
  return run;
}

VerifyRun merge_reports(const std::vector<std::string>& texts, OutputFormat format) {
  if (texts.empty()) throw ValidationError("merge: no reports given");
  std::vector<Json> docs;
  std::string kind;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    docs.push_back(json_io::parse(texts[i], "report " + std::to_string(i + 1)));
    std::string k;
    if (docs.back().is_object()) json_io::read(docs.back(), "kind", k, "report");
    if (k != "constants" && k != "verify")
      throw ValidationError("report " + std::to_string(i + 1) + ": kind must be constants or verify");
    if (i == 0) kind = k;
    if (k != kind) throw ValidationError("merge: reports of different kinds");
  }

  VerifyRun run;
  if (kind == "constants") {
    std::vector<ConstantsReport> all;
    for (const std::string& t : texts) {
      auto r = constants_from_json(t);
      all.insert(all.end(), r.begin(), r.end());
    }
    run.output = format == OutputFormat::Csv ? constants_to_csv(all) : constants_to_json(all);
    return run;
  }

  std::size_t total = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Json& d = docs[i];
    const std::string ctx = "report " + std::to_string(i + 1);
    json_io::require_object(d, {"schema_version", "kind", "suite", "scenarios", "parameters", "merged_from",
                                "exit_code", "checks"},
                            ctx);
    int version = 0;
    json_io::read(d, "schema_version", version, ctx);
    if (version != kSchemaVersion) throw ValidationError(ctx + ": unsupported schema_version");
    if (!d.contains("checks") || !d["checks"].is_array()) throw ValidationError(ctx + ".checks: expected an array");
    std::uint64_t n = 0;
    json_io::read(d, "scenarios", n, ctx);
    total += n;
    for (std::size_t k = 0; k < d["checks"].size(); ++k) {
      CheckResult c = json_io::check_from(d["checks"][k], ctx + ".checks[" + std::to_string(k) + "]");
      auto it = std::find_if(run.checks.begin(), run.checks.end(),
                             [&](const CheckResult& x) { return x.name == c.name; });
      if (it == run.checks.end()) {
        run.checks.push_back(std::move(c));
        continue;
      }
      CheckResult& m = *it;
      if (c.nondegenerate_scenarios > 0) {
        const bool better = m.nondegenerate_scenarios == 0 ||
                            (m.kind == BoundKind::Upper ? c.empirical_constant > m.empirical_constant
                                                        : c.empirical_constant < m.empirical_constant);
        if (better) {
          m.empirical_constant = c.empirical_constant;
          m.worst_witness = c.worst_witness;
        }
      }
      m.budget = m.kind == BoundKind::Upper ? std::min(m.budget, c.budget) : std::max(m.budget, c.budget);
      m.pass = m.pass && c.pass;
      m.samples += c.samples;
      m.degenerate += c.degenerate;
      m.violations += c.violations;
      m.scenarios += c.scenarios;
      m.skipped += c.skipped;
      m.nondegenerate_scenarios += c.nondegenerate_scenarios;
      if (!c.note.empty() && m.note.find(c.note) == std::string::npos)
        m.note = m.note.empty() ? c.note : m.note + "; " + c.note;
    }
  }
  run.exit_code = exit_code_of(run.checks);
  Json header = Json::object();
  header["scenarios"] = total;
  header["merged_from"] = texts.size();
  run.output = verify_output(run.checks, run.exit_code, header, format);
  return run;
}

std::string generate_config(std::uint64_t seed, const GeneratorConfig& g) {
  Json o = Json::object();
  o["schema_version"] = kSchemaVersion;
  o["scenario"] = json_io::to_json(generate_scenario(seed, g));
  return json_io::dump(o);
}

}  // namespace tw
