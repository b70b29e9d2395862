#include "twoweight/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace tw {

namespace {

std::int64_t index_at(double x, double shift, int level) {
  return static_cast<std::int64_t>(std::floor(std::ldexp(x - shift, level)));
}

// floor(m / 2^d) for d >= 0.
std::int64_t shift_down(std::int64_t m, int d) { return m >> d; }

}  // namespace

void GridSpec::validate() const {
  if (dimension < 1) throw ValidationError("grid dimension must be >= 1");
  if (static_cast<int>(shift.size()) != dimension)
    throw ValidationError("grid shift has wrong dimension");
  for (double s : shift)
    if (!(s >= 0.0 && s < 1.0)) throw ValidationError("grid shift must lie in [0,1)");
  if (level_min > level_max) throw ValidationError("grid level_min > level_max");
  if (level_min < -40 || level_max > 60) throw ValidationError("grid levels out of range");
  if (static_cast<int>(root.size()) != dimension)
    throw ValidationError("grid root has wrong dimension");
}

GridPtr make_grid(Point shift, int level_min, int level_max, std::span<const double> anchor) {
  GridSpec g;
  g.dimension = static_cast<int>(shift.size());
  g.shift = std::move(shift);
  g.level_min = level_min;
  g.level_max = level_max;
  if (static_cast<int>(anchor.size()) != g.dimension)
    throw ValidationError("grid anchor has wrong dimension");
  g.root.resize(g.dimension);
  for (int i = 0; i < g.dimension; ++i) g.root[i] = index_at(anchor[i], g.shift[i], level_min);
  g.validate();
  return std::make_shared<const GridSpec>(std::move(g));
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(x[i] >= lo[i] && x[i] < hi[i])) return false;
  return true;
}

bool Box::encloses(const Box& other) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (other.lo[i] < lo[i] || other.hi[i] > hi[i]) return false;
  return true;
}

Cube::Cube(GridPtr grid, int level, std::vector<std::int64_t> coords)
    : grid_(std::move(grid)), level_(level), coords_(std::move(coords)) {
  if (!grid_) throw std::invalid_argument("cube without grid");
  if (static_cast<int>(coords_.size()) != grid_->dimension)
    throw std::invalid_argument("cube coords have wrong dimension");
}

Cube Cube::containing(GridPtr grid, int level, std::span<const double> x) {
  std::vector<std::int64_t> m(grid->dimension);
  for (int i = 0; i < grid->dimension; ++i) m[i] = index_at(x[i], grid->shift[i], level);
  return Cube(std::move(grid), level, std::move(m));
}

Cube Cube::root_of(GridPtr grid) {
  const int level = grid->level_min;
  auto coords = grid->root;
  return Cube(std::move(grid), level, std::move(coords));
}

double Cube::side() const { return std::ldexp(1.0, -level_); }

double Cube::volume() const { return std::pow(side(), grid_->dimension); }

double Cube::lower(int axis) const {
  return grid_->shift[axis] + std::ldexp(static_cast<double>(coords_[axis]), -level_);
}

double Cube::upper(int axis) const {
  return grid_->shift[axis] + std::ldexp(static_cast<double>(coords_[axis] + 1), -level_);
}

Point Cube::center() const {
  Point c(dimension());
  for (int i = 0; i < dimension(); ++i)
    c[i] = grid_->shift[i] + std::ldexp(static_cast<double>(coords_[i]) + 0.5, -level_);
  return c;
}

Box Cube::box() const {
  Box b{Point(dimension()), Point(dimension())};
  for (int i = 0; i < dimension(); ++i) {
    b.lo[i] = lower(i);
    b.hi[i] = upper(i);
  }
  return b;
}

Box Cube::dilate(double gamma) const {
  const Point c = center();
  const double half = 0.5 * gamma * side();
  Box b{Point(dimension()), Point(dimension())};
  for (int i = 0; i < dimension(); ++i) {
    b.lo[i] = c[i] - half;
    b.hi[i] = c[i] + half;
  }
  return b;
}

bool Cube::contains(std::span<const double> x) const {
  for (int i = 0; i < dimension(); ++i)
    if (index_at(x[i], grid_->shift[i], level_) != coords_[i]) return false;
  return true;
}

bool Cube::contains(const Cube& other) const {
  if (grid_ != other.grid_ || other.level_ < level_) return false;
  const int d = other.level_ - level_;
  for (int i = 0; i < dimension(); ++i)
    if (shift_down(other.coords_[i], d) != coords_[i]) return false;
  return true;
}

bool Cube::is_root() const {
  return level_ == grid_->level_min && coords_ == grid_->root;
}

Cube Cube::parent(int ell) const {
  if (ell < 0) throw std::invalid_argument("parent: negative ell");
  if (level_ - ell < grid_->level_min)
    throw std::out_of_range("parent: climbing past the grid root level");
  std::vector<std::int64_t> m(coords_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = shift_down(coords_[i], ell);
  return Cube(grid_, level_ - ell, std::move(m));
}

Cube Cube::child(unsigned index) const {
  std::vector<std::int64_t> m(coords_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 2 * coords_[i] + ((index >> i) & 1U);
  return Cube(grid_, level_ + 1, std::move(m));
}

std::vector<Cube> Cube::children() const {
  const unsigned count = 1U << dimension();
  std::vector<Cube> out;
  out.reserve(count);
  for (unsigned k = 0; k < count; ++k) out.push_back(child(k));
  return out;
}

bool Cube::operator==(const Cube& other) const {
  return grid_ == other.grid_ && level_ == other.level_ && coords_ == other.coords_;
}

std::strong_ordering Cube::operator<=>(const Cube& other) const {
  if (auto c = level_ <=> other.level_; c != 0) return c;
  return coords_ <=> other.coords_;
}

void GoodnessParams::validate() const {
  if (r < 1) throw ValidationError("goodness: r must be a positive integer");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("goodness: epsilon must be in (0,1)");
  if (!(gamma >= 2.0)) throw ValidationError("goodness: gamma must be >= 2");
  if (!(gamma_prime > 2.0 && gamma_prime < gamma))
    throw ValidationError("goodness: need 2 < gamma' < gamma");
  if (!(c0 > 0.0)) throw ValidationError("goodness: C0 must be positive");
  if (ell_max < 0) throw ValidationError("goodness: ell_max must be >= 0");
}

bool GoodnessParams::gamma_admissible(int n, double alpha) const {
  return gamma >= std::sqrt(2.0 / (n - alpha));
}

bool GoodnessParams::c0_below_cross_threshold(int n, double alpha) const {
  return c0 < gamma / (2.0 * gamma_prime) * (n - alpha) / (n + 1.0 - alpha);
}

bool GoodnessParams::transverse_threshold(int n, double alpha) const {
  const double ratio = gamma_prime / gamma;
  return (n + 1.0 - alpha) * (gamma_prime / (gamma * c0) + ratio * ratio) < n - alpha;
}

double distance_to_boundary(const Cube& inner, const Cube& outer) {
  if (!outer.contains(inner)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inner.dimension(); ++i) {
    d = std::min(d, inner.lower(i) - outer.lower(i));
    d = std::min(d, outer.upper(i) - inner.upper(i));
  }
  return std::max(d, 0.0);
}

bool is_deeply_embedded(const Cube& inner, const Cube& outer, const GoodnessParams& p) {
  if (!outer.contains(inner)) return false;
  if (inner.level() - outer.level() < p.r) return false;
  // Written as a power of the level gap so dyadic rescaling is exact.
  const double required =
      0.5 * outer.side() * std::exp2(-p.epsilon * (inner.level() - outer.level()));
  return distance_to_boundary(inner, outer) >= required;
}

bool is_nearby(const Cube& inner, const Cube& outer, const GoodnessParams& p) {
  return outer.contains(inner) && inner.level() - outer.level() < p.r;
}

bool is_good(const Cube& cube, const GoodnessParams& p) {
  const Cube root = Cube::root_of(cube.grid_ptr());
  if (!root.contains(cube)) return true;
  for (int ell = 1; cube.level() - ell >= cube.grid().level_min; ++ell) {
    if (ell <= p.r) continue;
    if (!is_deeply_embedded(cube, cube.parent(ell), p)) return false;
  }
  return true;
}

namespace {

// Descends from `q`; the first deep cube met along each branch is maximal
// because deep embedding in a fixed K passes to dyadic children.
void collect_deep(const Cube& q, const Cube& outer, const GoodnessParams& p,
                  std::span<const Point> support, const std::vector<std::size_t>* members,
                  std::vector<Cube>& out) {
  if (q.level() - outer.level() >= p.r && is_deeply_embedded(q, outer, p)) {
    out.push_back(q);
    return;
  }
  if (q.level() >= q.grid().level_max) return;
  for (const Cube& c : q.children()) {
    if (members == nullptr) {
      collect_deep(c, outer, p, support, nullptr, out);
      continue;
    }
    std::vector<std::size_t> inside;
    for (std::size_t k : *members)
      if (c.contains(support[k])) inside.push_back(k);
    if (!inside.empty()) collect_deep(c, outer, p, support, &inside, out);
  }
}

std::vector<Cube> deep_impl(const Cube& outer, const GoodnessParams& p,
                            std::span<const Point> support, bool restricted) {
  std::vector<Cube> out;
  if (restricted) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < support.size(); ++k)
      if (outer.contains(support[k])) members.push_back(k);
    if (members.empty()) return out;
    collect_deep(outer, outer, p, support, &members, out);
  } else {
    collect_deep(outer, outer, p, support, nullptr, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cube> refined_impl(const Cube& outer, int ell, const GoodnessParams& p,
                               std::span<const Point> support, bool restricted) {
  const Cube lifted = outer.parent(ell);
  const auto base = deep_impl(outer, p, support, restricted);
  if (ell == 0) return base;
  const auto candidates = deep_impl(lifted, p, support, restricted);
  std::vector<Cube> out;
  for (const Cube& j : candidates) {
    const bool inside = std::any_of(base.begin(), base.end(),
                                    [&](const Cube& l) { return l.contains(j); });
    if (inside) out.push_back(j);
  }
  return out;
}

}  // namespace

std::vector<Cube> maximal_deep_subcubes(const Cube& outer, const GoodnessParams& p,
                                        std::span<const Point> support) {
  return deep_impl(outer, p, support, true);
}

std::vector<Cube> maximal_deep_subcubes(const Cube& outer, const GoodnessParams& p) {
  return deep_impl(outer, p, {}, false);
}

std::vector<Cube> refined_deep_subcubes(const Cube& outer, int ell, const GoodnessParams& p,
                                        std::span<const Point> support) {
  return refined_impl(outer, ell, p, support, true);
}

std::vector<Cube> refined_deep_subcubes(const Cube& outer, int ell, const GoodnessParams& p) {
  return refined_impl(outer, ell, p, {}, false);
}

int overlap_constant(const Cube& outer, std::span<const Cube> family, double gamma) {
  if (family.empty()) return 0;
  const int n = outer.dimension();
  std::vector<Box> boxes;
  boxes.reserve(family.size());
  for (const Cube& j : family) boxes.push_back(j.dilate(gamma));

  // Coverage is constant on every cell of the product arrangement spanned by
  // the box faces, so one midpoint per cell is exact.
  std::vector<std::vector<double>> mids(n);
  for (int i = 0; i < n; ++i) {
    std::set<double> cuts;
    for (const Box& b : boxes) {
      cuts.insert(b.lo[i]);
      cuts.insert(b.hi[i]);
    }
    const std::vector<double> sorted(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k)
      mids[i].push_back(0.5 * (sorted[k] + sorted[k + 1]));
  }
  // Per axis, which boxes cover each midpoint.
  std::vector<std::vector<std::vector<std::size_t>>> covers(n);
  for (int i = 0; i < n; ++i) {
    covers[i].resize(mids[i].size());
    for (std::size_t k = 0; k < mids[i].size(); ++k)
      for (std::size_t b = 0; b < boxes.size(); ++b)
        if (mids[i][k] >= boxes[b].lo[i] && mids[i][k] < boxes[b].hi[i]) covers[i][k].push_back(b);
  }

  int best = 0;
  std::vector<std::size_t> cell(n, 0);
  std::vector<int> tally(boxes.size());
  for (;;) {
    std::fill(tally.begin(), tally.end(), 0);
    for (int i = 0; i < n; ++i)
      for (std::size_t b : covers[i][cell[i]]) ++tally[b];
    const int count = static_cast<int>(std::count(tally.begin(), tally.end(), n));
    best = std::max(best, count);
    int axis = 0;
    while (axis < n && ++cell[axis] == mids[axis].size()) cell[axis++] = 0;
    if (axis == n) break;
  }
  return best;
}

const char* to_string(Region region) {
  switch (region) {
    case Region::InsideJStar: return "INSIDE_JSTAR";
    case Region::End: return "END";
    case Region::Side: return "SIDE";
    case Region::OutsideI: return "OUTSIDE_I";
  }
  return "?";
}

Region end_side_classify(const Cube& outer, const Cube& inner, double gamma,
                         std::span<const double> y) {
  if (!outer.contains(y)) return Region::OutsideI;
  if (inner.dilate(gamma).contains(y)) return Region::InsideJStar;
  const Point c = inner.center();
  const double axial = std::abs(y[0] - c[0]);
  double transverse = 0.0;
  for (int i = 1; i < inner.dimension(); ++i) transverse += (y[i] - c[i]) * (y[i] - c[i]);
  transverse = std::sqrt(transverse);
  if (axial >= 0.5 * gamma * inner.side() && transverse <= axial / gamma) return Region::End;
  return Region::Side;
}

void LineSpec::validate() const {
  if (point.size() != direction.size() || point.empty())
    throw ValidationError("line: point and direction dimensions differ");
  for (double v : point)
    if (!std::isfinite(v)) throw ValidationError("line: non-finite point");
  if (std::abs(norm(direction) - 1.0) > 1e-12)
    throw ValidationError("line: direction must be a unit vector");
}

double LineSpec::project(std::span<const double> y) const {
  double t = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) t += (y[i] - point[i]) * direction[i];
  return t;
}

double LineSpec::distance(std::span<const double> y) const {
  const double t = project(y);
  double s = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double d = y[i] - point[i] - t * direction[i];
    s += d * d;
  }
  return std::sqrt(s);
}

LineSpec LineSpec::axis(int n) {
  LineSpec l{Point(n, 0.0), Point(n, 0.0)};
  l.direction[0] = 1.0;
  return l;
}

Interval carleson_shadow(std::span<const double> y, double gamma, const LineSpec& line) {
  const double t = line.project(y);
  const double half = gamma * line.distance(y);
  return {t - half, t + half};
}

}  // namespace tw
