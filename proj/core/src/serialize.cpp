#include "twoweight/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "json_io.hpp"

namespace tw {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace json_io {

namespace {

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void write(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const Json& e : j) flat = flat && is_scalar(e);
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], out, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string key_ctx(const std::string& ctx, const char* key) {
  return ctx.empty() ? key : ctx + "." + key;
}

[[noreturn]] void type_error(const std::string& ctx, const char* expected) {
  throw ValidationError(ctx + ": expected " + expected);
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  write(j, out, 0);
  out += "\n";
  return out;
}

Json parse(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(what + ": malformed JSON: " + e.what());
  }
}

Json real(double v) {
  if (std::isfinite(v)) return Json(v);
  return Json(format_double(v));
}

double as_real(const Json& j, const std::string& ctx) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  type_error(ctx, "a number");
}

void require_object(const Json& obj, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
  if (!obj.is_object()) type_error(ctx.empty() ? "document" : ctx, "an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ValidationError(key_ctx(ctx, it.key().c_str()) + ": unknown key");
  }
}

void read(const Json& obj, const char* key, double& out, const std::string& ctx) {
  if (obj.contains(key)) out = as_real(obj[key], key_ctx(ctx, key));
}

void read(const Json& obj, const char* key, int& out, const std::string& ctx) {
  if (!obj.contains(key)) return;
  const Json& v = obj[key];
  if (!v.is_number_integer()) type_error(key_ctx(ctx, key), "an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    type_error(key_ctx(ctx, key), "an integer in range");
  out = static_cast<int>(x);
}

void read(const Json& obj, const char* key, std::uint64_t& out, const std::string& ctx) {
  if (!obj.contains(key)) return;
  const Json& v = obj[key];
  if (v.is_number_unsigned()) {
    out = v.get<std::uint64_t>();
  } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    out = static_cast<std::uint64_t>(v.get<std::int64_t>());
  } else {
    type_error(key_ctx(ctx, key), "a non-negative integer");
  }
}

void read(const Json& obj, const char* key, bool& out, const std::string& ctx) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_boolean()) type_error(key_ctx(ctx, key), "a boolean");
  out = obj[key].get<bool>();
}

void read(const Json& obj, const char* key, std::string& out, const std::string& ctx) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_string()) type_error(key_ctx(ctx, key), "a string");
  out = obj[key].get<std::string>();
}

Point read_point(const Json& j, const std::string& ctx) {
  if (!j.is_array()) type_error(ctx, "an array of numbers");
  Point p;
  p.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) type_error(ctx + "[" + std::to_string(i) + "]", "a number");
    p.push_back(j[i].get<double>());
  }
  return p;
}

namespace {

Json point_json(const Point& p) {
  Json a = Json::array();
  for (double v : p) a.push_back(real(v));
  return a;
}

Json measure_json(const DiscreteMeasure& mu) {
  Json a = Json::array();
  for (const Atom& at : mu.atoms()) {
    Json o = Json::object();
    o["x"] = point_json(at.location);
    o["mass"] = real(at.mass);
    a.push_back(std::move(o));
  }
  return a;
}

DiscreteMeasure measure_from(const Json& j, int n, const std::string& ctx) {
  if (!j.is_array()) type_error(ctx, "an array of atoms");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string c = ctx + "[" + std::to_string(i) + "]";
    require_object(j[i], {"x", "mass"}, c);
    if (!j[i].contains("x") || !j[i].contains("mass")) throw ValidationError(c + ": needs x and mass");
    atoms.push_back(Atom{read_point(j[i]["x"], c + ".x"), as_real(j[i]["mass"], c + ".mass")});
  }
  return DiscreteMeasure(n, std::move(atoms));
}

LineRole role_from(const Json& obj, const char* key, LineRole fallback, const std::string& ctx) {
  std::string s = to_string(fallback);
  read(obj, key, s, ctx);
  return line_role_from_string(s);
}

Json cube_json(const CubeRef& c) {
  Json o = Json::object();
  o["grid"] = c.grid;
  o["level"] = c.level;
  o["coords"] = c.coords;
  return o;
}

CubeRef cube_from(const Json& j, const std::string& ctx) {
  require_object(j, {"grid", "level", "coords"}, ctx);
  CubeRef c;
  read(j, "grid", c.grid, ctx);
  read(j, "level", c.level, ctx);
  if (!j.contains("coords") || !j["coords"].is_array()) type_error(ctx + ".coords", "an array");
  for (const Json& v : j["coords"]) {
    if (!v.is_number_integer()) type_error(ctx + ".coords", "integers");
    c.coords.push_back(v.get<std::int64_t>());
  }
  return c;
}

}  // namespace

Json to_json(const GoodnessParams& p) {
  Json o = Json::object();
  o["r"] = p.r;
  o["epsilon"] = real(p.epsilon);
  o["gamma"] = real(p.gamma);
  o["gamma_prime"] = real(p.gamma_prime);
  o["c0"] = real(p.c0);
  o["ell_max"] = p.ell_max;
  return o;
}

GoodnessParams goodness_from(const Json& j, GoodnessParams p, const std::string& ctx) {
  require_object(j, {"r", "epsilon", "gamma", "gamma_prime", "c0", "ell_max"}, ctx);
  read(j, "r", p.r, ctx);
  read(j, "epsilon", p.epsilon, ctx);
  read(j, "gamma", p.gamma, ctx);
  read(j, "gamma_prime", p.gamma_prime, ctx);
  read(j, "c0", p.c0, ctx);
  read(j, "ell_max", p.ell_max, ctx);
  p.validate();
  return p;
}

Json to_json(const PartitionStrategy& p) {
  Json o = Json::object();
  o["trivial"] = p.trivial;
  o["uniform_depth"] = p.uniform_depth;
  o["random_samples"] = p.random_samples;
  o["seed"] = p.seed;
  o["split_probability"] = real(p.split_probability);
  o["greedy"] = p.greedy;
  o["dp"] = p.dp;
  return o;
}

PartitionStrategy partitions_from(const Json& j, const std::string& ctx) {
  require_object(j, {"trivial", "uniform_depth", "random_samples", "seed", "split_probability", "greedy", "dp"},
                 ctx);
  PartitionStrategy p;
  read(j, "trivial", p.trivial, ctx);
  read(j, "uniform_depth", p.uniform_depth, ctx);
  read(j, "random_samples", p.random_samples, ctx);
  read(j, "seed", p.seed, ctx);
  read(j, "split_probability", p.split_probability, ctx);
  read(j, "greedy", p.greedy, ctx);
  read(j, "dp", p.dp, ctx);
  p.validate();
  return p;
}

Json to_json(const Scenario& s) {
  Json o = Json::object();
  o["n"] = s.n;
  o["alpha"] = real(s.alpha);
  o["sigma"] = measure_json(s.sigma);
  o["omega"] = measure_json(s.omega);
  if (s.line) {
    Json l = Json::object();
    l["point"] = point_json(s.line->point);
    l["direction"] = point_json(s.line->direction);
    l["role"] = to_string(s.line_role);
    o["line"] = std::move(l);
  }
  o["goodness"] = to_json(s.goodness);
  Json g = Json::object();
  g["level_min"] = s.grids.level_min;
  g["level_max"] = s.grids.level_max;
  if (!s.grids.shifts.empty()) {
    Json sh = Json::array();
    for (const Point& p : s.grids.shifts) sh.push_back(point_json(p));
    g["shifts"] = std::move(sh);
  }
  if (s.grids.anchor) g["anchor"] = point_json(*s.grids.anchor);
  o["grids"] = std::move(g);
  if (s.truncation) {
    Json t = Json::object();
    t["delta"] = real(s.truncation->delta);
    t["r_outer"] = real(s.truncation->r_outer);
    o["truncation"] = std::move(t);
  }
  o["c_norm"] = real(s.c_norm);
  o["wbp_comparability"] = real(s.wbp_comparability);
  if (s.flipped_component >= 0) {
    Json f = Json::object();
    f["flip_kernel_component"] = s.flipped_component + 1;
    o["fault_injection"] = std::move(f);
  }
  return o;
}

Scenario scenario_from(const Json& j, const std::string& ctx) {
  require_object(j,
                 {"n", "alpha", "sigma", "omega", "line", "goodness", "grids", "truncation", "c_norm",
                  "wbp_comparability", "fault_injection"},
                 ctx);
  if (!j.contains("n") || !j.contains("alpha")) throw ValidationError(ctx + ": n and alpha are required");
  Scenario s;
  read(j, "n", s.n, ctx);
  if (s.n < 1 || s.n > 16) throw ValidationError(key_ctx(ctx, "n") + ": must lie in [1, 16]");
  read(j, "alpha", s.alpha, ctx);
  s.sigma = j.contains("sigma") ? measure_from(j["sigma"], s.n, key_ctx(ctx, "sigma")) : DiscreteMeasure(s.n);
  s.omega = j.contains("omega") ? measure_from(j["omega"], s.n, key_ctx(ctx, "omega")) : DiscreteMeasure(s.n);
  if (j.contains("line")) {
    const std::string c = key_ctx(ctx, "line");
    const Json& l = j["line"];
    require_object(l, {"point", "direction", "role"}, c);
    if (!l.contains("point") || !l.contains("direction") || !l.contains("role"))
      throw ValidationError(c + ": needs point, direction and role");
    LineSpec line{read_point(l["point"], c + ".point"), read_point(l["direction"], c + ".direction")};
    const double len = norm(line.direction);
    if (!(len > 0.0) || !std::isfinite(len)) throw ValidationError(c + ".direction: must be nonzero");
    for (double& d : line.direction) d /= len;
    s.line = std::move(line);
    s.line_role = role_from(l, "role", LineRole::None, c);
  }
  if (j.contains("goodness")) s.goodness = goodness_from(j["goodness"], s.goodness, key_ctx(ctx, "goodness"));
  if (j.contains("grids")) {
    const std::string c = key_ctx(ctx, "grids");
    const Json& g = j["grids"];
    require_object(g, {"level_min", "level_max", "shifts", "anchor"}, c);
    read(g, "level_min", s.grids.level_min, c);
    read(g, "level_max", s.grids.level_max, c);
    if (s.grids.level_min < -40 || s.grids.level_max > 40)
      throw ValidationError(c + ": levels must lie in [-40, 40]");
    if (g.contains("shifts")) {
      if (!g["shifts"].is_array()) type_error(c + ".shifts", "an array");
      for (std::size_t i = 0; i < g["shifts"].size(); ++i)
        s.grids.shifts.push_back(read_point(g["shifts"][i], c + ".shifts[" + std::to_string(i) + "]"));
    }
    if (g.contains("anchor")) s.grids.anchor = read_point(g["anchor"], c + ".anchor");
  }
  if (j.contains("truncation")) {
    const std::string c = key_ctx(ctx, "truncation");
    require_object(j["truncation"], {"delta", "r_outer"}, c);
    double delta = 0.0, r_outer = 0.0;
    read(j["truncation"], "delta", delta, c);
    read(j["truncation"], "r_outer", r_outer, c);
    s.truncation = Truncation::make(delta, r_outer, s.n, s.alpha);
  }
  read(j, "c_norm", s.c_norm, ctx);
  read(j, "wbp_comparability", s.wbp_comparability, ctx);
  if (j.contains("fault_injection")) {
    const std::string c = key_ctx(ctx, "fault_injection");
    require_object(j["fault_injection"], {"flip_kernel_component"}, c);
    int k = 0;
    read(j["fault_injection"], "flip_kernel_component", k, c);
    if (k < 1 || k > s.n) throw ValidationError(c + ".flip_kernel_component: must lie in [1, n]");
    s.flipped_component = k - 1;
  }
  s.validate();
  return s;
}

Json to_json(const GeneratorConfig& g) {
  Json o = Json::object();
  o["n"] = g.n;
  o["alpha"] = real(g.alpha);
  o["atoms_sigma"] = g.atoms_sigma;
  o["atoms_omega"] = g.atoms_omega;
  o["line"] = to_string(g.on_line);
  const Box b = g.effective_box();
  Json box = Json::object();
  box["lo"] = point_json(b.lo);
  box["hi"] = point_json(b.hi);
  o["box"] = std::move(box);
  o["level_max"] = g.level_max;
  o["goodness"] = to_json(g.goodness);
  return o;
}

GeneratorConfig generator_from(const Json& j, const std::string& ctx) {
  require_object(j, {"n", "alpha", "atoms_sigma", "atoms_omega", "line", "box", "level_max", "goodness"}, ctx);
  GeneratorConfig g;
  read(j, "n", g.n, ctx);
  if (g.n < 1 || g.n > 16) throw ValidationError(key_ctx(ctx, "n") + ": must lie in [1, 16]");
  read(j, "alpha", g.alpha, ctx);
  read(j, "atoms_sigma", g.atoms_sigma, ctx);
  read(j, "atoms_omega", g.atoms_omega, ctx);
  g.on_line = role_from(j, "line", g.on_line, ctx);
  if (j.contains("box")) {
    const std::string c = key_ctx(ctx, "box");
    require_object(j["box"], {"lo", "hi"}, c);
    if (!j["box"].contains("lo") || !j["box"].contains("hi")) throw ValidationError(c + ": needs lo and hi");
    g.box = Box{read_point(j["box"]["lo"], c + ".lo"), read_point(j["box"]["hi"], c + ".hi")};
  }
  read(j, "level_max", g.level_max, ctx);
  if (j.contains("goodness")) g.goodness = goodness_from(j["goodness"], g.goodness, key_ctx(ctx, "goodness"));
  g.validate();
  return g;
}

Json to_json(const SuiteConfig& c) {
  Json o = Json::object();
  o["seed"] = c.seed;
  o["count"] = c.count;
  o["n"] = c.n;
  Json a = Json::array();
  for (double v : c.alphas) a.push_back(real(v));
  o["alphas"] = std::move(a);
  o["atoms_min"] = c.atoms_min;
  o["atoms_max"] = c.atoms_max;
  o["line"] = to_string(c.on_line);
  o["level_max"] = c.level_max;
  return o;
}

SuiteConfig suite_from(const Json& j, const std::string& ctx) {
  require_object(j, {"seed", "count", "n", "alphas", "atoms_min", "atoms_max", "line", "level_max"}, ctx);
  SuiteConfig c;
  read(j, "seed", c.seed, ctx);
  read(j, "count", c.count, ctx);
  read(j, "n", c.n, ctx);
  if (j.contains("alphas")) c.alphas = read_point(j["alphas"], key_ctx(ctx, "alphas"));
  read(j, "atoms_min", c.atoms_min, ctx);
  read(j, "atoms_max", c.atoms_max, ctx);
  c.on_line = role_from(j, "line", c.on_line, ctx);
  read(j, "level_max", c.level_max, ctx);
  c.validate();
  return c;
}

Json to_json(const Witness& w) {
  Json o = Json::object();
  Json cubes = Json::array();
  for (const CubeRef& c : w.cubes) cubes.push_back(cube_json(c));
  o["cubes"] = std::move(cubes);
  o["ell"] = w.ell;
  Json part = Json::array();
  for (const CubeRef& c : w.partition) part.push_back(cube_json(c));
  o["partition"] = std::move(part);
  o["strategy"] = w.strategy;
  return o;
}

Witness witness_from(const Json& j, const std::string& ctx) {
  require_object(j, {"cubes", "ell", "partition", "strategy"}, ctx);
  Witness w;
  for (const char* key : {"cubes", "partition"}) {
    if (!j.contains(key)) continue;
    if (!j[key].is_array()) type_error(key_ctx(ctx, key), "an array");
    auto& dst = std::string(key) == "cubes" ? w.cubes : w.partition;
    for (std::size_t i = 0; i < j[key].size(); ++i)
      dst.push_back(cube_from(j[key][i], key_ctx(ctx, key) + "[" + std::to_string(i) + "]"));
  }
  read(j, "ell", w.ell, ctx);
  read(j, "strategy", w.strategy, ctx);
  return w;
}

Json to_json(const ConstantsReport& r, std::size_t index) {
  Json o = Json::object();
  o["index"] = index;
  Json recs = Json::array();
  for (const ConstantRecord& c : r.records) {
    Json e = Json::object();
    e["name"] = c.name;
    e["value"] = real(c.value);
    e["witness"] = to_json(c.witness);
    e["family"] = c.family;
    e["strategy"] = c.strategy;
    e["runtime_ms"] = real(c.runtime_ms);
    recs.push_back(std::move(e));
  }
  o["constants"] = std::move(recs);
  return o;
}

Json to_json(const CheckResult& c) {
  Json o = Json::object();
  o["name"] = c.name;
  o["tier"] = to_string(c.tier);
  o["kind"] = to_string(c.kind);
  o["asserted"] = c.asserted;
  o["pass"] = c.pass;
  o["empirical_constant"] = real(c.empirical_constant);
  o["budget"] = real(c.budget);
  o["samples"] = c.samples;
  o["degenerate"] = c.degenerate;
  o["violations"] = c.violations;
  o["scenarios"] = c.scenarios;
  o["skipped"] = c.skipped;
  o["nondegenerate_scenarios"] = c.nondegenerate_scenarios;
  o["worst_witness"] = c.worst_witness;
  o["note"] = c.note;
  return o;
}

CheckResult check_from(const Json& j, const std::string& ctx) {
  require_object(j,
                 {"name", "tier", "kind", "asserted", "pass", "empirical_constant", "budget", "samples",
                  "degenerate", "violations", "scenarios", "skipped", "nondegenerate_scenarios",
                  "worst_witness", "note"},
                 ctx);
  for (const char* key : {"name", "tier", "kind", "pass", "empirical_constant"})
    if (!j.contains(key)) throw ValidationError(key_ctx(ctx, key) + ": missing");
  CheckResult c;
  read(j, "name", c.name, ctx);
  std::string tier, kind;
  read(j, "tier", tier, ctx);
  read(j, "kind", kind, ctx);
  if (tier == "exactness") c.tier = Tier::Exactness;
  else if (tier == "baseline") c.tier = Tier::Baseline;
  else if (tier == "report") c.tier = Tier::Report;
  else throw ValidationError(key_ctx(ctx, "tier") + ": unknown tier '" + tier + "'");
  if (kind == "upper") c.kind = BoundKind::Upper;
  else if (kind == "lower") c.kind = BoundKind::Lower;
  else throw ValidationError(key_ctx(ctx, "kind") + ": unknown kind '" + kind + "'");
  read(j, "asserted", c.asserted, ctx);
  read(j, "pass", c.pass, ctx);
  read(j, "empirical_constant", c.empirical_constant, ctx);
  read(j, "budget", c.budget, ctx);
  std::uint64_t v = 0;
  auto count = [&](const char* key, std::size_t& dst) {
    v = 0;
    read(j, key, v, ctx);
    dst = static_cast<std::size_t>(v);
  };
  count("samples", c.samples);
  count("degenerate", c.degenerate);
  count("violations", c.violations);
  count("scenarios", c.scenarios);
  count("skipped", c.skipped);
  count("nondegenerate_scenarios", c.nondegenerate_scenarios);
  read(j, "worst_witness", c.worst_witness, ctx);
  read(j, "note", c.note, ctx);
  return c;
}

}  // namespace json_io

using json_io::Json;

std::string scenario_to_json(const Scenario& s) { return json_io::dump(json_io::to_json(s)); }

Scenario scenario_from_json(const std::string& text) {
  return json_io::scenario_from(json_io::parse(text, "scenario"), "scenario");
}

std::string witness_to_string(const Witness& w) {
  std::string out;
  auto cube = [](const CubeRef& c) {
    std::string s = "g" + std::to_string(c.grid) + ":L" + std::to_string(c.level) + "[";
    for (std::size_t i = 0; i < c.coords.size(); ++i) s += (i ? "," : "") + std::to_string(c.coords[i]);
    return s + "]";
  };
  for (std::size_t i = 0; i < w.cubes.size(); ++i) out += (i ? " " : "") + cube(w.cubes[i]);
  if (w.ell >= 0) out += " ell=" + std::to_string(w.ell);
  if (!w.partition.empty()) {
    out += " pieces=";
    for (std::size_t i = 0; i < w.partition.size(); ++i) out += (i ? ";" : "") + cube(w.partition[i]);
  }
  if (!w.strategy.empty()) out += " strategy=" + w.strategy;
  return out;
}

std::string constants_to_json(const std::vector<ConstantsReport>& reports) {
  Json o = Json::object();
  o["schema_version"] = kSchemaVersion;
  o["kind"] = "constants";
  Json arr = Json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) arr.push_back(json_io::to_json(reports[i], i));
  o["scenarios"] = std::move(arr);
  return json_io::dump(o);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string constants_to_csv(const std::vector<ConstantsReport>& reports) {
  std::string out = "scenario,name,value,witness,family,strategy,runtime_ms\n";
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (const ConstantRecord& c : reports[i].records)
      out += std::to_string(i) + "," + csv_field(c.name) + "," + format_double(c.value) + "," +
             csv_field(witness_to_string(c.witness)) + "," + csv_field(c.family) + "," +
             csv_field(c.strategy) + "," + format_double(c.runtime_ms) + "\n";
  return out;
}

std::vector<ConstantsReport> constants_from_json(const std::string& text) {
  const Json j = json_io::parse(text, "constants report");
  json_io::require_object(j, {"schema_version", "kind", "scenarios"}, "");
  int version = 0;
  std::string kind;
  json_io::read(j, "schema_version", version, "");
  json_io::read(j, "kind", kind, "");
  if (version != kSchemaVersion) throw ValidationError("schema_version: unsupported version");
  if (kind != "constants") throw ValidationError("kind: expected 'constants'");
  if (!j.contains("scenarios") || !j["scenarios"].is_array()) throw ValidationError("scenarios: expected an array");
  std::vector<ConstantsReport> out;
  for (std::size_t i = 0; i < j["scenarios"].size(); ++i) {
    const std::string ctx = "scenarios[" + std::to_string(i) + "]";
    const Json& sc = j["scenarios"][i];
    json_io::require_object(sc, {"index", "constants"}, ctx);
    if (!sc.contains("constants") || !sc["constants"].is_array())
      throw ValidationError(ctx + ".constants: expected an array");
    ConstantsReport r;
    for (std::size_t k = 0; k < sc["constants"].size(); ++k) {
      const std::string c = ctx + ".constants[" + std::to_string(k) + "]";
      const Json& e = sc["constants"][k];
      json_io::require_object(e, {"name", "value", "witness", "family", "strategy", "runtime_ms"}, c);
      ConstantRecord rec;
      json_io::read(e, "name", rec.name, c);
      json_io::read(e, "value", rec.value, c);
      if (e.contains("witness")) rec.witness = json_io::witness_from(e["witness"], c + ".witness");
      json_io::read(e, "family", rec.family, c);
      json_io::read(e, "strategy", rec.strategy, c);
      json_io::read(e, "runtime_ms", rec.runtime_ms, c);
      r.records.push_back(std::move(rec));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string checks_to_csv(const std::vector<CheckResult>& checks) {
  std::string out =
      "name,tier,kind,asserted,pass,empirical_constant,budget,samples,degenerate,violations,scenarios,"
      "skipped,nondegenerate_scenarios,worst_witness,note\n";
  for (const CheckResult& c : checks)
    out += csv_field(c.name) + "," + to_string(c.tier) + "," + to_string(c.kind) + "," +
           (c.asserted ? "true" : "false") + "," + (c.pass ? "true" : "false") + "," +
           format_double(c.empirical_constant) + "," + format_double(c.budget) + "," +
           std::to_string(c.samples) + "," + std::to_string(c.degenerate) + "," +
           std::to_string(c.violations) + "," + std::to_string(c.scenarios) + "," +
           std::to_string(c.skipped) + "," + std::to_string(c.nondegenerate_scenarios) + "," +
           csv_field(c.worst_witness) + "," + csv_field(c.note) + "\n";
  return out;
}

}  // namespace tw
