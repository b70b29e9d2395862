#include "twoweight/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tw {

const char* to_string(LineRole role) {
  switch (role) {
    case LineRole::None: return "none";
    case LineRole::Sigma: return "sigma";
    case LineRole::Omega: return "omega";
    case LineRole::Both: return "both";
  }
  return "none";
}

LineRole line_role_from_string(const std::string& s) {
  if (s == "none") return LineRole::None;
  if (s == "sigma") return LineRole::Sigma;
  if (s == "omega") return LineRole::Omega;
  if (s == "both") return LineRole::Both;
  throw ValidationError("unknown line role '" + s + "'");
}

std::vector<Point> default_grid_shifts(int n) {
  std::vector<Point> out;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    Point s(n);
    for (int i = 0; i < n; ++i) {
      const bool bit = (mask >> i) & 1U;
      if (i == 0)
        s[i] = bit ? 1.0 / 12.0 : 0.0;
      else
        s[i] = bit ? 5.0 / 12.0 : 0.5;
    }
    out.push_back(std::move(s));
  }
  return out;
}

void Scenario::validate() const {
  if (n < 1) throw ValidationError("scenario: n must be >= 1");
  if (!(alpha >= 0.0 && alpha < n)) throw ValidationError("scenario: alpha must lie in [0, n)");
  if (sigma.dimension() != n || omega.dimension() != n)
    throw ValidationError("scenario: measure dimension differs from n");
  check_no_common_points(sigma, omega);
  goodness.validate();
  if (!goodness.gamma_admissible(n, alpha))
    throw ValidationError("scenario: gamma must be at least sqrt(2 / (n - alpha))");
  if (goodness.ell_max > 16) throw ValidationError("scenario: ell_max too large");
  kernel().validate();
  if (grids.level_min > grids.level_max) throw ValidationError("scenario: level_min > level_max");
  for (const Point& s : grids.shifts)
    if (static_cast<int>(s.size()) != n) throw ValidationError("scenario: grid shift dimension");
  if (grids.anchor && static_cast<int>(grids.anchor->size()) != n)
    throw ValidationError("scenario: grid anchor dimension");
  if (truncation) truncation->validate(n, alpha);
  if (wbp_comparability != 0.0 && !(wbp_comparability >= 1.0))
    throw ValidationError("scenario: WBP comparability must be >= 1");
  if (line_role != LineRole::None && !line)
    throw ValidationError("scenario: line role set without a line");
  if (line) {
    if (static_cast<int>(line->point.size()) != n) throw ValidationError("scenario: line dimension");
    line->validate();
    if ((line_role == LineRole::Sigma || line_role == LineRole::Both) &&
        !is_supported_on_line(sigma, *line))
      throw ValidationError("scenario: sigma is not supported on the line");
    if ((line_role == LineRole::Omega || line_role == LineRole::Both) &&
        !is_supported_on_line(omega, *line))
      throw ValidationError("scenario: omega is not supported on the line");
  }
  for (const GridPtr& g : build_grids()) g->validate();
}

KernelParams Scenario::kernel() const {
  return KernelParams{n, alpha, c_norm, flipped_component};
}

Truncation Scenario::effective_truncation() const {
  if (truncation) return *truncation;
  return default_truncation(sigma, omega, n, alpha);
}

std::vector<GridPtr> Scenario::build_grids() const {
  Point anchor(n, 0.0);
  if (grids.anchor) {
    anchor = *grids.anchor;
  } else if (!sigma.empty() || !omega.empty()) {
    Point lo(n, std::numeric_limits<double>::infinity());
    Point hi(n, -std::numeric_limits<double>::infinity());
    for (const auto* mu : {&sigma, &omega})
      for (const Atom& a : mu->atoms())
        for (int i = 0; i < n; ++i) {
          lo[i] = std::min(lo[i], a.location[i]);
          hi[i] = std::max(hi[i], a.location[i]);
        }
    for (int i = 0; i < n; ++i) anchor[i] = 0.5 * (lo[i] + hi[i]);
  }
  const auto shifts = grids.shifts.empty() ? default_grid_shifts(n) : grids.shifts;
  std::vector<GridPtr> out;
  out.reserve(shifts.size());
  for (const Point& s : shifts) out.push_back(make_grid(s, grids.level_min, grids.level_max, anchor));
  return out;
}

double Scenario::wbp_constant_c() const {
  return wbp_comparability > 0.0 ? wbp_comparability : std::ldexp(1.0, goodness.r);
}

namespace {

struct RigidMotion {
  std::vector<Point> u;  // rows
  Point offset;

  Point apply(const Point& x) const {
    Point y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) y[i] += u[i][j] * x[j];
      y[i] -= offset[i];
    }
    return y;
  }
};

RigidMotion motion_for(const LineSpec& line) {
  const std::size_t n = line.direction.size();
  RigidMotion m{std::vector<Point>(n, Point(n, 0.0)), Point(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) m.u[i][i] = 1.0;
  Point v = line.direction;
  v[0] -= 1.0;
  const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
  if (vv > 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.u[i][j] -= 2.0 * v[i] * v[j] / vv;
    if (n >= 2)
      for (std::size_t j = 0; j < n; ++j) m.u[n - 1][j] = -m.u[n - 1][j];
  }
  Point up(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) up[i] += m.u[i][j] * line.point[j];
  for (std::size_t i = 1; i < n; ++i) m.offset[i] = up[i];
  return m;
}

DiscreteMeasure move(const DiscreteMeasure& mu, const RigidMotion& m, bool snap) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const Atom& a : mu.atoms()) {
    Atom b{m.apply(a.location), a.mass};
    if (snap) std::fill(b.location.begin() + 1, b.location.end(), 0.0);
    atoms.push_back(std::move(b));
  }
  return DiscreteMeasure(mu.dimension(), std::move(atoms));
}

}  // namespace

Scenario canonicalize_line(const Scenario& s) {
  if (!s.line || s.line_role == LineRole::None)
    throw ValidationError("canonicalize_line: scenario has no flagged line");
  const double len = norm(s.line->direction);
  if (!(len > 0.0) || !std::isfinite(len))
    throw ValidationError("canonicalize_line: degenerate line direction");
  LineSpec line = *s.line;
  for (double& d : line.direction) d /= len;
  const RigidMotion m = motion_for(line);
  Scenario out = s;
  const bool snap_sigma = s.line_role == LineRole::Sigma || s.line_role == LineRole::Both;
  const bool snap_omega = s.line_role == LineRole::Omega || s.line_role == LineRole::Both;
  out.sigma = move(s.sigma, m, snap_sigma);
  out.omega = move(s.omega, m, snap_omega);
  if (s.grids.anchor) out.grids.anchor = m.apply(*s.grids.anchor);
  out.line = LineSpec::axis(s.n);
  return out;
}

}  // namespace tw
