#include "twoweight/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "twoweight/energy.hpp"
#include "twoweight/transform.hpp"

namespace tw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string cube_tag(const Cube& q) {
  std::string s = "L" + std::to_string(q.level()) + "[";
  bool first = true;
  for (std::int64_t c : q.coords()) {
    if (!first) s += ",";
    s += std::to_string(c);
    first = false;
  }
  return s + "]";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Running extreme of num/den ratios; 0/0 is tallied as degenerate.
class Extremum {
 public:
  explicit Extremum(BoundKind kind) : kind_(kind) {}

  template <class W>
  void add(double num, double den, W&& witness) {
    ++m_.samples;
    if (num == 0.0 && den == 0.0) {
      ++m_.degenerate;
      return;
    }
    add_value(den == 0.0 ? kInf : num / den, std::forward<W>(witness));
  }

  template <class W>
  void add_value(double v, W&& witness) {
    if (!have_ || (kind_ == BoundKind::Upper ? v > m_.value : v < m_.value)) {
      m_.value = v;
      m_.witness = witness();
      have_ = true;
    }
  }

  void count_sample() { ++m_.samples; }
  void count_degenerate() {
    ++m_.samples;
    ++m_.degenerate;
  }
  Measurement& raw() { return m_; }
  Measurement take() { return std::move(m_); }

 private:
  BoundKind kind_;
  bool have_ = false;
  Measurement m_;
};

Measurement skipped(std::string why) {
  Measurement m;
  m.skipped = true;
  m.note = std::move(why);
  return m;
}

/// Raw-kernel transform of the listed atoms of mu at y.
Point riesz_at(const DiscreteMeasure& mu, std::span<const std::size_t> idx,
               std::span<const double> y, const KernelParams& kp) {
  const int n = kp.n;
  std::vector<std::vector<double>> terms(n);
  for (auto& t : terms) t.reserve(idx.size());
  Point w(n);
  for (std::size_t i : idx) {
    const Atom& a = mu[i];
    for (int l = 0; l < n; ++l) w[l] = y[l] - a.location[l];
    const Point k = riesz_kernel(w, kp);
    for (int l = 0; l < n; ++l) terms[l].push_back(k[l] * a.mass);
  }
  Point out(n);
  for (int l = 0; l < n; ++l) out[l] = pairwise_sum(terms[l]);
  return out;
}

DiscreteMeasure subset(const DiscreteMeasure& mu, std::span<const std::size_t> idx) {
  std::vector<Atom> atoms;
  atoms.reserve(idx.size());
  for (std::size_t i : idx) atoms.push_back(mu[i]);
  return DiscreteMeasure(mu.dimension(), std::move(atoms));
}

std::vector<std::size_t> atoms_where(const DiscreteMeasure& mu, const PointPredicate& keep) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (keep(mu[i].location)) out.push_back(i);
  return out;
}

bool on_axis(const DiscreteMeasure& mu) {
  for (const Atom& a : mu.atoms())
    for (std::size_t i = 1; i < a.location.size(); ++i)
      if (a.location[i] != 0.0) return false;
  return true;
}

/// Closed dilate box meets the x1-axis.
bool box_meets_axis(const Box& b) {
  for (std::size_t i = 1; i < b.lo.size(); ++i)
    if (!(b.lo[i] <= 0.0 && 0.0 <= b.hi[i])) return false;
  return true;
}

struct Roles {
  const DiscreteMeasure* line = nullptr;
  const DiscreteMeasure* free = nullptr;
  /// Direction whose first (normalising) measure is the free one.
  Direction direction = Direction::Forward;
};

std::optional<Roles> roles_of(const Scenario& s) {
  if (!s.line || s.line_role == LineRole::None) return std::nullopt;
  if (s.line_role == LineRole::Sigma) return Roles{&s.sigma, &s.omega, Direction::Backward};
  return Roles{&s.omega, &s.sigma, Direction::Forward};
}

}  // namespace

const char* to_string(Tier t) {
  switch (t) {
    case Tier::Exactness: return "exactness";
    case Tier::Baseline: return "baseline";
    case Tier::Report: return "report";
  }
  return "report";
}

const char* to_string(BoundKind k) { return k == BoundKind::Upper ? "upper" : "lower"; }

const char* to_string(ReversalMode m) {
  switch (m) {
    case ReversalMode::WeakOffline: return "weak_offline";
    case ReversalMode::StrongAxial: return "strong_axial";
    case ReversalMode::WeakTransverseMin: return "weak_transverse_min";
    case ReversalMode::WeakTransverseMax: return "weak_transverse_max";
    case ReversalMode::ForwardEndMin: return "forward_end_min";
    case ReversalMode::ForwardEndMax: return "forward_end_max";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Generation

void GeneratorConfig::validate() const {
  if (n < 1) throw ValidationError("generator: n must be >= 1");
  if (!(alpha >= 0.0 && alpha < n)) throw ValidationError("generator: alpha must lie in [0, n)");
  if (atoms_sigma < 0 || atoms_omega < 0) throw ValidationError("generator: negative atom count");
  if (level_max < 0 || level_max > 40) throw ValidationError("generator: level_max out of range");
  goodness.validate();
  if (box) {
    if (static_cast<int>(box->lo.size()) != n || static_cast<int>(box->hi.size()) != n)
      throw ValidationError("generator: box dimension differs from n");
    for (int i = 0; i < n; ++i)
      if (!(box->lo[i] < box->hi[i]) || !std::isfinite(box->lo[i]) || !std::isfinite(box->hi[i]))
        throw ValidationError("generator: empty or unbounded box");
    if (on_line != LineRole::None)
      for (int i = 1; i < n; ++i)
        if (!(box->lo[i] <= 0.0 && 0.0 < box->hi[i]))
          throw ValidationError("generator: box does not meet the x1-axis");
  }
}

Box GeneratorConfig::effective_box() const {
  if (box) return *box;
  Box b{Point(n, -0.375), Point(n, 0.375)};
  b.lo[0] = 0.125;
  b.hi[0] = 0.875;
  return b;
}

Scenario generate_scenario(std::uint64_t seed, const GeneratorConfig& cfg) {
  cfg.validate();
  const Box box = cfg.effective_box();
  Rng rng(seed);
  std::set<Point> used;
  const double lo_mass = std::log(0.1);
  const double hi_mass = std::log(10.0);

  auto draw = [&](int count, bool on_line) {
    std::vector<Atom> atoms;
    atoms.reserve(count);
    for (int k = 0; k < count; ++k) {
      Point x(cfg.n, 0.0);
      do {
        for (int i = 0; i < cfg.n; ++i)
          x[i] = (on_line && i > 0) ? 0.0 : rng.uniform(box.lo[i], box.hi[i]);
      } while (used.count(x));
      used.insert(x);
      atoms.push_back(Atom{x, std::exp(rng.uniform(lo_mass, hi_mass))});
    }
    return atoms;
  };

  const bool sigma_line = cfg.on_line == LineRole::Sigma || cfg.on_line == LineRole::Both;
  const bool omega_line = cfg.on_line == LineRole::Omega || cfg.on_line == LineRole::Both;
  Scenario s;
  s.n = cfg.n;
  s.alpha = cfg.alpha;
  s.sigma = DiscreteMeasure(cfg.n, draw(cfg.atoms_sigma, sigma_line));
  s.omega = DiscreteMeasure(cfg.n, draw(cfg.atoms_omega, omega_line));
  if (cfg.on_line != LineRole::None) s.line = LineSpec::axis(cfg.n);
  s.line_role = cfg.on_line;
  s.goodness = cfg.goodness;
  s.grids.level_max = cfg.level_max;
  Point anchor(cfg.n);
  for (int i = 0; i < cfg.n; ++i) anchor[i] = 0.5 * (box.lo[i] + box.hi[i]);
  s.grids.anchor = anchor;
  s.validate();
  return s;
}

void SuiteConfig::validate() const {
  if (count < 0) throw ValidationError("suite: negative count");
  if (n < 1) throw ValidationError("suite: n must be >= 1");
  if (alphas.empty()) throw ValidationError("suite: no alpha values");
  for (double a : alphas)
    if (!(a >= 0.0 && a < n)) throw ValidationError("suite: alpha must lie in [0, n)");
  if (atoms_min < 0 || atoms_max < atoms_min) throw ValidationError("suite: bad atom range");
  if (level_max < 0 || level_max > 40) throw ValidationError("suite: level_max out of range");
}

std::vector<Scenario> generate_suite(const SuiteConfig& cfg) {
  cfg.validate();
  std::vector<Scenario> out;
  out.reserve(cfg.count);
  const auto span = static_cast<std::uint64_t>(cfg.atoms_max - cfg.atoms_min + 1);
  for (int k = 0; k < cfg.count; ++k) {
    const std::uint64_t sk = mix_seed(cfg.seed, static_cast<std::uint64_t>(k));
    Rng counts(mix_seed(sk, 0));
    GeneratorConfig g;
    g.n = cfg.n;
    g.alpha = cfg.alphas[static_cast<std::size_t>(k) % cfg.alphas.size()];
    g.atoms_sigma = cfg.atoms_min + static_cast<int>(counts.below(span));
    g.atoms_omega = cfg.atoms_min + static_cast<int>(counts.below(span));
    g.on_line = cfg.on_line;
    g.level_max = cfg.level_max;
    out.push_back(generate_scenario(mix_seed(sk, 1), g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalogue

GoodnessParams default_reversal_params() {
  GoodnessParams p;
  p.r = 4;
  p.epsilon = 0.5;
  p.gamma = 16.0;
  p.gamma_prime = 4.0;
  p.c0 = 0.8;
  p.ell_max = 0;
  return p;
}

const std::vector<CheckSpec>& check_catalog() {
  static const std::vector<CheckSpec> specs{
      {"testing_vs_norm", Tier::Exactness, BoundKind::Upper, true, VacuityGuard::None},
      {"zero_operator", Tier::Exactness, BoundKind::Upper, true, VacuityGuard::None},
      {"necessity", Tier::Baseline, BoundKind::Upper, true, VacuityGuard::Scenarios},
      {"energy_lemma", Tier::Baseline, BoundKind::Upper, true, VacuityGuard::Samples},
      {"reversal_weak_offline", Tier::Baseline, BoundKind::Lower, true, VacuityGuard::Samples},
      {"reversal_strong_axial", Tier::Baseline, BoundKind::Lower, true, VacuityGuard::Samples},
      {"reversal_weak_transverse_min", Tier::Baseline, BoundKind::Lower, true, VacuityGuard::Samples},
      {"reversal_weak_transverse_max", Tier::Baseline, BoundKind::Upper, true, VacuityGuard::Samples},
      {"reversal_forward_end_min", Tier::Baseline, BoundKind::Lower, true, VacuityGuard::Samples},
      {"reversal_forward_end_max", Tier::Baseline, BoundKind::Upper, true, VacuityGuard::Samples},
      {"shadow_bound", Tier::Baseline, BoundKind::Upper, true, VacuityGuard::Samples},
      {"shadow_partition_spread", Tier::Baseline, BoundKind::Upper, true, VacuityGuard::Samples},
      {"plug_hole", Tier::Baseline, BoundKind::Upper, true, VacuityGuard::Samples},
      {"shadow_characterization", Tier::Report, BoundKind::Upper, false, VacuityGuard::None},
      {"necessity_offline", Tier::Report, BoundKind::Upper, false, VacuityGuard::None},
      {"backward_testing_vs_forward_norm", Tier::Report, BoundKind::Upper, false, VacuityGuard::None},
  };
  return specs;
}

// ---------------------------------------------------------------------------
// Exactness tier

Measurement check_testing_vs_norm(const Scenario& s, const ConstantsReport& c) {
  Extremum acc(BoundKind::Upper);
  const double nf = c.value("op_norm");
  const double nb = c.value("op_norm_adjoint");
  const double root_n = std::sqrt(static_cast<double>(s.n));
  const struct {
    const char* label;
    double num, den;
  } pairs[] = {
      {"testing_forward/op_norm", c.value("testing_forward"), nf},
      {"testing_backward/op_norm_adjoint", c.value("testing_backward"), nb},
      {"wbp/op_norm", c.value("wbp"), nf},
      {"wbp/op_norm_adjoint", c.value("wbp"), nb},
      {"testing_backward/(sqrt(n) op_norm)", c.value("testing_backward"), root_n * nf},
      {"op_norm_adjoint/(sqrt(n) op_norm)", nb, root_n * nf},
  };
  for (const auto& p : pairs) acc.add(p.num, p.den, [&] { return std::string(p.label); });

  // The kernel itself against its closed form at w = (3, 4, 5, ...).
  const KernelParams kp = s.kernel();
  Point w(s.n);
  for (int l = 0; l < s.n; ++l) w[l] = 3.0 + l;
  const Point k = riesz_kernel(w, kp);
  const double scale = kp.c_norm / std::pow(norm(w), s.n + 1 - s.alpha);
  Measurement m = acc.take();
  for (int l = 0; l < s.n; ++l) {
    const double expect = scale * w[l];
    if (std::abs(k[l] - expect) > 1e-12 * std::abs(expect)) {
      ++m.violations;
      m.note = "kernel component " + std::to_string(l + 1) + " disagrees with its closed form";
    }
  }
  return m;
}

Measurement check_backward_testing_vs_forward_norm(const ConstantsReport& c) {
  Extremum acc(BoundKind::Upper);
  acc.add(c.value("testing_backward"), c.value("op_norm"), [] { return std::string("testing_backward/op_norm"); });
  return acc.take();
}

Measurement check_zero_operator(const Scenario& s) {
  if (s.n < 2) return skipped("no transverse components when n = 1");
  if (!on_axis(s.sigma) || !on_axis(s.omega)) return skipped("a measure is not on the x1-axis");
  if (s.omega.empty() || s.sigma.empty()) return skipped("empty measure");
  const std::vector<double> ones(s.sigma.size(), 1.0);
  const auto pts = s.omega.locations();
  const auto t = apply_transform(ones, s.sigma, pts, s.effective_truncation(), s.kernel());
  double scale = 0.0;
  for (std::size_t b = 0; b < pts.size(); ++b) scale = std::max(scale, std::abs(t[b * s.n]));
  if (scale == 0.0) scale = 1.0;
  Measurement m;
  m.samples = pts.size();
  for (std::size_t b = 0; b < pts.size(); ++b)
    for (int l = 1; l < s.n; ++l) {
      const double v = std::abs(t[b * s.n + l]) / scale;
      if (v > m.value || m.witness.empty()) {
        m.value = std::max(m.value, v);
        m.witness = "omega atom " + std::to_string(b) + " component " + std::to_string(l + 1);
      }
    }
  return m;
}

std::optional<Scenario> axis_companion(const Scenario& s) {
  if (on_axis(s.sigma) && on_axis(s.omega)) return s;
  auto flatten = [](const DiscreteMeasure& mu) {
    std::vector<Atom> atoms = mu.atoms();
    for (Atom& a : atoms) std::fill(a.location.begin() + 1, a.location.end(), 0.0);
    return atoms;
  };
  std::set<Point> seen;
  for (const auto* mu : {&s.sigma, &s.omega})
    for (const Atom& a : flatten(*mu))
      if (!seen.insert(a.location).second) return std::nullopt;
  Scenario out = s;
  out.sigma = DiscreteMeasure(s.n, flatten(s.sigma));
  out.omega = DiscreteMeasure(s.n, flatten(s.omega));
  out.truncation.reset();
  out.line = LineSpec::axis(s.n);
  out.line_role = LineRole::Both;
  return out;
}

// ---------------------------------------------------------------------------
// Necessity ratios

Measurement check_necessity(const ConstantsReport& c, Direction d) {
  const std::string suffix = d == Direction::Forward ? "_forward" : "_backward";
  const double num = c.value("energy" + suffix);
  const double den = std::sqrt(c.value("a2" + suffix)) + c.value("testing" + suffix);
  Extremum acc(BoundKind::Upper);
  acc.add(num, den, [&] { return std::string(to_string(d)); });
  Measurement m = acc.take();
  if (den == 0.0 && num > 0.0) m.note = "positive energy with vanishing A2 and testing constants";
  return m;
}

Measurement check_plug_hole(const ConstantsReport& c) {
  Extremum acc(BoundKind::Upper);
  const double beta = c.value("overlap_beta");
  const double a2 = c.value("a2_classical");
  for (Direction d : {Direction::Forward, Direction::Backward}) {
    const std::string suffix = d == Direction::Forward ? "_forward" : "_backward";
    const double plug = c.value("energy_plug" + suffix);
    const double e = c.value("energy" + suffix);
    acc.add(plug * plug, e * e + beta * a2, [&] { return std::string(to_string(d)); });
  }
  return acc.take();
}

Measurement check_energy_lemma(const Scenario& s, int trials, std::uint64_t seed) {
  if (s.omega.empty()) return skipped("empty omega");
  const KernelParams kp = s.kernel();
  const double gamma = s.goodness.gamma;
  const auto grids = s.build_grids();
  Extremum acc(BoundKind::Upper);
  for (std::size_t g = 0; g < grids.size(); ++g) {
    for (const Cube& j : occupied_cubes(grids[g], {&s.omega})) {
      const auto members = atoms_where(s.omega, [&](auto x) { return j.contains(x); });
      if (members.size() < 2) continue;
      const Box star = j.dilate(gamma);
      const auto outside = atoms_where(s.sigma, [&](auto x) { return !star.contains(x); });
      const DiscreteMeasure nu = subset(s.sigma, outside);
      const double poisson = poisson_standard(j, nu, kp) / j.side();
      const double spread = std::sqrt(variance_of(s.omega, members));
      std::vector<Point> field;
      field.reserve(members.size());
      for (std::size_t b : members) field.push_back(riesz_at(s.sigma, outside, s.omega[b].location, kp));
      const std::uint64_t cube_seed =
          mix_seed(mix_seed(seed, g), mix_seed(static_cast<std::uint64_t>(j.level()),
                                               static_cast<std::uint64_t>(j.coords()[0]) * 1000003ULL +
                                                   static_cast<std::uint64_t>(j.coords().back())));
      for (int t = 0; t < trials; ++t) {
        Rng rng(mix_seed(cube_seed, static_cast<std::uint64_t>(t)));
        std::vector<double> psi(members.size());
        std::vector<double> wpsi(members.size()), wmass(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) {
          psi[k] = rng.normal();
          wmass[k] = s.omega[members[k]].mass;
          wpsi[k] = wmass[k] * psi[k];
        }
        const double shift = pairwise_sum(wpsi) / pairwise_sum(wmass);
        std::vector<double> sq(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) {
          psi[k] -= shift;
          sq[k] = wmass[k] * psi[k] * psi[k];
        }
        const double psi_norm = std::sqrt(pairwise_sum(sq));
        Point pairing(s.n);
        std::vector<double> terms(members.size());
        for (int l = 0; l < s.n; ++l) {
          for (std::size_t k = 0; k < members.size(); ++k) terms[k] = wmass[k] * psi[k] * field[k][l];
          pairing[l] = pairwise_sum(terms);
        }
        acc.add(norm(pairing), psi_norm * poisson * spread, [&] {
          return "grid=" + std::to_string(g) + " J=" + cube_tag(j) + " trial=" + std::to_string(t);
        });
      }
    }
  }
  return acc.take();
}

// ---------------------------------------------------------------------------
// Reversal diagnostics

double axial_difference_quotient(const DiscreteMeasure& mu, const Point& x, const Point& z,
                                 const KernelParams& kp) {
  std::vector<std::size_t> all(mu.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double rx = riesz_at(mu, all, x, kp)[0];
  const double rz = riesz_at(mu, all, z, kp)[0];
  return std::abs(rx - rz) / std::abs(x[0] - z[0]);
}

Measurement check_reversal(const Scenario& s, ReversalMode mode, const GoodnessParams& rp) {
  const auto roles = roles_of(s);
  if (!roles) return skipped("no measure is flagged on a line");
  if (s.n < 2 && (mode == ReversalMode::WeakOffline || mode == ReversalMode::WeakTransverseMin ||
                  mode == ReversalMode::WeakTransverseMax))
    return skipped("no off-line points when n = 1");
  if (!on_axis(*roles->line)) return skipped("line measure is not on the x1-axis");
  const bool forward_end = mode == ReversalMode::ForwardEndMin || mode == ReversalMode::ForwardEndMax;
  if (forward_end && !rp.gamma_admissible(s.n, s.alpha))
    return skipped("gamma below sqrt(2 / (n - alpha))");
  if (mode == ReversalMode::StrongAxial &&
      !(rp.c0_below_cross_threshold(s.n, s.alpha) && rp.transverse_threshold(s.n, s.alpha)))
    return skipped("C0, gamma, gamma' violate the axial reversal thresholds");

  const DiscreteMeasure& lam = *roles->line;
  const DiscreteMeasure& nu = *roles->free;
  const KernelParams kp = s.kernel();
  const BoundKind kind = (mode == ReversalMode::WeakTransverseMax || mode == ReversalMode::ForwardEndMax)
                             ? BoundKind::Upper
                             : BoundKind::Lower;
  Extremum acc(kind);
  const auto grids = s.build_grids();
  const auto nu_locs = nu.locations();
  const auto lam_locs = lam.locations();

  for (std::size_t g = 0; g < grids.size(); ++g) {
    for (const Cube& outer : occupied_cubes(grids[g], {&lam, &nu})) {
      if (outer.level() + rp.r > outer.grid().level_max) continue;
      const auto js = maximal_deep_subcubes(outer, rp, forward_end ? lam_locs : nu_locs);
      for (const Cube& j : js) {
        auto tag = [&](std::size_t a, std::size_t b) {
          std::string w = "grid=" + std::to_string(g) + " I=" + cube_tag(outer) + " J=" + cube_tag(j) +
                          " atom=" + std::to_string(a);
          if (b != static_cast<std::size_t>(-1)) w += "," + std::to_string(b);
          return w;
        };
        const double ell = j.side();
        if (forward_end) {
          const auto end = atoms_where(nu, [&](auto y) {
            return end_side_classify(outer, j, rp.gamma, y) == Region::End;
          });
          if (end.empty()) continue;
          const DiscreteMeasure e = subset(nu, end);
          const double rhs = poisson_standard(j, e, kp) / ell;
          const auto inside = atoms_where(lam, [&](auto x) { return j.contains(x); });
          std::vector<double> r1(inside.size());
          for (std::size_t k = 0; k < inside.size(); ++k)
            r1[k] = riesz_at(nu, end, lam[inside[k]].location, kp)[0];
          for (std::size_t a = 0; a < inside.size(); ++a)
            for (std::size_t b = a + 1; b < inside.size(); ++b) {
              const double dx = std::abs(lam[inside[a]].location[0] - lam[inside[b]].location[0]);
              if (dx == 0.0) continue;
              acc.add(std::abs(r1[a] - r1[b]) / dx, rhs, [&] { return tag(inside[a], inside[b]); });
            }
          continue;
        }
        const bool meets = box_meets_axis(j.dilate(rp.gamma_prime));
        const auto ys = atoms_where(nu, [&](auto y) { return j.contains(y); });
        if (ys.empty()) continue;
        if (mode == ReversalMode::WeakOffline) {
          if (meets) continue;
          const auto in_i = atoms_where(lam, [&](auto x) { return outer.contains(x); });
          if (in_i.empty()) continue;
          const double rhs = poisson_standard(j, subset(lam, in_i), kp);
          for (std::size_t y : ys)
            acc.add(norm(riesz_at(lam, in_i, nu[y].location, kp)), rhs,
                    [&] { return tag(y, static_cast<std::size_t>(-1)); });
          continue;
        }
        if (!meets) continue;
        const Box star = j.dilate(rp.gamma);
        const auto away =
            atoms_where(lam, [&](auto x) { return outer.contains(x) && !star.contains(x); });
        if (away.empty()) continue;
        const double rhs = poisson_standard(j, subset(lam, away), kp) / ell;
        std::vector<Point> field(ys.size());
        for (std::size_t k = 0; k < ys.size(); ++k) field[k] = riesz_at(lam, away, nu[ys[k]].location, kp);
        if (mode == ReversalMode::StrongAxial) {
          for (std::size_t a = 0; a < ys.size(); ++a)
            for (std::size_t b = a + 1; b < ys.size(); ++b) {
              const double dx = std::abs(nu[ys[a]].location[0] - nu[ys[b]].location[0]);
              if (dx == 0.0) continue;
              Point diff(s.n);
              for (int l = 0; l < s.n; ++l) diff[l] = field[a][l] - field[b][l];
              acc.add(norm(diff), dx * rhs, [&] { return tag(ys[a], ys[b]); });
            }
        } else {
          for (std::size_t k = 0; k < ys.size(); ++k)
            for (int l = 1; l < s.n; ++l) {
              const double h = std::abs(nu[ys[k]].location[l]);
              if (h == 0.0) continue;
              acc.add(std::abs(field[k][l]), h * rhs,
                      [&] { return tag(ys[k], static_cast<std::size_t>(-1)) + " component=" +
                                   std::to_string(l + 1); });
            }
        }
      }
    }
  }
  Measurement m = acc.take();
  if (m.samples == 0) m.note = "no admissible cube or atom pair";
  return m;
}

// ---------------------------------------------------------------------------
// Shadow tail

double shadow_exponent(int n, double alpha) {
  return alpha >= n - 1 ? n + 1 - alpha : 2.0;
}

ShadowOutcome check_shadow_bound(const Scenario& s, const PartitionStrategy& ps) {
  ShadowOutcome out;
  const auto roles = roles_of(s);
  if (!roles) {
    out.bound = out.spread = out.characterization = skipped("no measure is flagged on a line");
    return out;
  }
  if (!on_axis(*roles->line)) {
    out.bound = out.spread = out.characterization = skipped("line measure is not on the x1-axis");
    return out;
  }
  const Direction d = roles->direction;
  const DiscreteMeasure& nu = *roles->free;
  const Valued best = energy_constant(s, d, ps);
  Extremum bound(BoundKind::Upper), spread(BoundKind::Upper);
  Measurement chars;
  if (best.witness.empty() || best.value == 0.0) {
    bound.count_degenerate();
    spread.count_degenerate();
    out.bound = bound.take();
    out.spread = spread.take();
    out.bound.note = out.spread.note = "energy vanishes; no decomposition to test";
    out.characterization = chars;
    return out;
  }
  const auto grids = s.build_grids();
  const Cube outer = best.witness.cubes[0].resolve(grids);
  const double p = shadow_exponent(s.n, s.alpha);
  const double gamma = s.goodness.gamma;
  const LineSpec axis = LineSpec::axis(s.n);
  const auto ys = atoms_where(nu, [&](auto y) { return outer.contains(y); });

  std::vector<double> per_partition;
  std::vector<std::string> labels;
  for (const Witness& w : energy_partitions(s, d, false, best.witness.cubes[0], ps)) {
    if (w.ell != best.witness.ell) continue;
    const auto js = energy_decomposition(s, d, grids, w);
    const std::string label = w.strategy + " pieces=" + std::to_string(w.partition.size());
    double max_f = 0.0;
    for (std::size_t y : ys) {
      const Point& loc = nu[y].location;
      const Interval sh = carleson_shadow(loc, gamma, axis);
      std::vector<double> terms;
      for (const Cube& j : js) {
        if (end_side_classify(outer, j, gamma, loc) != Region::Side) continue;
        ++chars.samples;
        if (!sh.intersects(j.lower(0), j.upper(0))) {
          ++chars.violations;
          if (chars.witness.empty()) chars.witness = label + " J=" + cube_tag(j) + " atom=" + std::to_string(y);
        }
        const double side = j.side();
        terms.push_back(std::pow(side / (side + distance(loc, j.center())), p));
      }
      const double f = pairwise_sum(terms);
      bound.add_value(f, [&] { return label + " I=" + cube_tag(outer) + " atom=" + std::to_string(y); });
      bound.count_sample();
      max_f = std::max(max_f, f);
    }
    per_partition.push_back(max_f);
    labels.push_back(label);
  }
  if (bound.raw().samples == 0) bound.count_degenerate();

  double hi = 0.0, lo = kInf;
  std::size_t hi_at = 0, lo_at = 0;
  for (std::size_t k = 0; k < per_partition.size(); ++k) {
    if (per_partition[k] <= 0.0) continue;
    if (per_partition[k] > hi) hi = per_partition[k], hi_at = k;
    if (per_partition[k] < lo) lo = per_partition[k], lo_at = k;
  }
  if (hi > 0.0)
    spread.add(hi, lo, [&] { return labels[hi_at] + " vs " + labels[lo_at]; });
  else
    spread.count_degenerate();

  out.bound = bound.take();
  out.spread = spread.take();
  chars.value = static_cast<double>(chars.violations);
  out.characterization = chars;
  return out;
}

// ---------------------------------------------------------------------------
// Per-scenario driver and aggregation

std::map<std::string, Measurement> measure_scenario(const Scenario& s, std::size_t index,
                                                    const VerifyOptions& opt) {
  std::map<std::string, Measurement> out;
  const Scenario sc = (s.line && s.line_role != LineRole::None) ? canonicalize_line(s) : s;
  ConstantsOptions co;
  co.partitions = opt.partitions;
  co.workers = 1;
  const ConstantsReport c = compute_constants(sc, co);

  if (opt.exactness) {
    out["testing_vs_norm"] = check_testing_vs_norm(sc, c);
    out["backward_testing_vs_forward_norm"] = check_backward_testing_vs_forward_norm(c);
    const auto flat = axis_companion(sc);
    out["zero_operator"] =
        flat ? check_zero_operator(*flat) : skipped("projection onto the x1-axis merges atoms");
  }
  if (opt.baseline) {
    Measurement nec;
    bool have = false;
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      const Measurement m = check_necessity(c, d);
      nec.samples += m.samples;
      nec.degenerate += m.degenerate;
      if (nec.note.empty()) nec.note = m.note;
      if (m.samples > m.degenerate && (!have || m.value > nec.value)) {
        nec.value = m.value;
        nec.witness = m.witness;
        have = true;
      }
    }
    if (sc.line_role == LineRole::None) {
      out["necessity_offline"] = nec;
      out["necessity"] = skipped("no measure is flagged on a line");
    } else {
      out["necessity"] = nec;
    }
    out["plug_hole"] = check_plug_hole(c);
    out["energy_lemma"] = check_energy_lemma(sc, opt.lemma_trials, mix_seed(opt.seed, index));
    for (ReversalMode m : {ReversalMode::WeakOffline, ReversalMode::StrongAxial,
                           ReversalMode::WeakTransverseMin, ReversalMode::WeakTransverseMax,
                           ReversalMode::ForwardEndMin, ReversalMode::ForwardEndMax})
      out[std::string("reversal_") + to_string(m)] = check_reversal(sc, m, opt.reversal);
    ShadowOutcome sh = check_shadow_bound(sc, opt.partitions);
    out["shadow_bound"] = std::move(sh.bound);
    out["shadow_partition_spread"] = std::move(sh.spread);
    out["shadow_characterization"] = std::move(sh.characterization);
  }
  const std::string prefix = "scenario=" + std::to_string(index);
  for (auto& [name, m] : out)
    if (!m.witness.empty()) m.witness = prefix + " " + m.witness;
  return out;
}

CheckResult aggregate(const CheckSpec& spec, const std::vector<Measurement>& ms) {
  CheckResult r;
  r.name = spec.name;
  r.tier = spec.tier;
  r.kind = spec.kind;
  r.asserted = spec.asserted;
  bool have = false;
  std::string skip_note;
  for (const Measurement& m : ms) {
    ++r.scenarios;
    if (m.skipped) {
      ++r.skipped;
      if (skip_note.empty()) skip_note = m.note;
      continue;
    }
    r.samples += m.samples;
    r.degenerate += m.degenerate;
    r.violations += m.violations;
    if (!m.note.empty() && r.note.empty()) r.note = m.note;
    const bool contributes = m.samples > m.degenerate || spec.tier == Tier::Report;
    if (!contributes) continue;
    ++r.nondegenerate_scenarios;
    const bool better = spec.kind == BoundKind::Upper ? m.value > r.empirical_constant
                                                      : m.value < r.empirical_constant;
    if (!have || better) {
      r.empirical_constant = m.value;
      r.worst_witness = m.witness;
      have = true;
    }
  }
  if (r.skipped > 0) {
    const std::string s = "skipped on " + std::to_string(r.skipped) + " scenario(s): " + skip_note;
    r.note = r.note.empty() ? s : r.note + "; " + s;
  }
  return r;
}

void judge(CheckResult& r, double budget) {
  r.budget = budget;
  const auto& cat = check_catalog();
  const auto it = std::find_if(cat.begin(), cat.end(), [&](const CheckSpec& c) { return c.name == r.name; });
  const VacuityGuard guard = it != cat.end() ? it->guard : VacuityGuard::None;
  if (!r.asserted) {
    r.pass = true;
    return;
  }
  bool ok = true;
  if (r.nondegenerate_scenarios > 0) {
    ok = r.kind == BoundKind::Upper ? r.empirical_constant <= budget : r.empirical_constant >= budget;
    if (std::isnan(r.empirical_constant)) ok = false;
  }
  if (r.tier == Tier::Exactness && r.violations > 0) ok = false;
  auto vacuous = [&](std::size_t good, std::size_t total, const char* what) {
    if (total > 0 && 5 * good >= 4 * total) return;
    ok = false;
    const std::string s = "only " + std::to_string(good) + " of " + std::to_string(total) + " " + what +
                          " are non-degenerate";
    r.note = r.note.empty() ? s : r.note + "; " + s;
  };
  if (guard == VacuityGuard::Samples) vacuous(r.samples - r.degenerate, r.samples, "samples");
  if (guard == VacuityGuard::Scenarios)
    vacuous(r.nondegenerate_scenarios, r.scenarios - r.skipped, "evaluated scenarios");
  if (!ok && r.note.empty()) r.note = "empirical constant " + fmt(r.empirical_constant) + " outside budget " + fmt(budget);
  r.pass = ok;
}

}  // namespace tw
