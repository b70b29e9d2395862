#pragma once

// Dyadic grids and cubes, goodness and deep-embedding predicates, maximal
// deep subcube decompositions, dilations, end/side splitting and shadows.

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "twoweight/numeric.hpp"

namespace tw {

/// A translated dyadic grid. Cubes at level k have side 2^-k and occupy
///   prod_i [shift_i + m_i 2^-k, shift_i + (m_i + 1) 2^-k).
/// All enumeration is confined to the root cube, which sits at level_min.
struct GridSpec {
  int dimension = 1;
  Point shift;
  int level_min = 0;
  int level_max = 8;
  std::vector<std::int64_t> root;

  void validate() const;
};

using GridPtr = std::shared_ptr<const GridSpec>;

/// Builds a validated grid whose root is the level_min cube containing `anchor`.
GridPtr make_grid(Point shift, int level_min, int level_max, std::span<const double> anchor);

/// Axis-aligned half-open box prod_i [lo_i, hi_i).
struct Box {
  Point lo;
  Point hi;

  bool contains(std::span<const double> x) const;
  /// True if `other` (as a closed set) lies in the closure of this box.
  bool encloses(const Box& other) const;
};

class Cube {
 public:
  Cube(GridPtr grid, int level, std::vector<std::int64_t> coords);

  /// The cube of `grid` at `level` containing x.
  static Cube containing(GridPtr grid, int level, std::span<const double> x);
  static Cube root_of(GridPtr grid);

  const GridSpec& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int dimension() const { return grid_->dimension; }
  int level() const { return level_; }
  std::span<const std::int64_t> coords() const { return coords_; }

  /// Side length l(Q) = 2^-level = |Q|^(1/n).
  double side() const;
  /// Lebesgue measure |Q| = side^n.
  double volume() const;
  double lower(int axis) const;
  double upper(int axis) const;
  Point center() const;
  Box box() const;
  /// The dilate gamma*Q about the centre, as a half-open box.
  Box dilate(double gamma) const;

  /// Half-open membership. Consistent with `containing` at every level, so
  /// each point lies in exactly one cube per level.
  bool contains(std::span<const double> x) const;
  /// Dyadic inclusion (same grid, this is an ancestor-or-self of `other`).
  bool contains(const Cube& other) const;
  bool is_root() const;

  /// pi^ell Q. Throws std::out_of_range when climbing past level_min.
  Cube parent(int ell = 1) const;
  /// Child number `index` in [0, 2^n); bit i selects the upper half along axis i.
  Cube child(unsigned index) const;
  std::vector<Cube> children() const;

  /// Same grid object and same (level, coords).
  bool operator==(const Cube& other) const;
  /// Lexicographic on (level, coords); only meaningful within one grid.
  std::strong_ordering operator<=>(const Cube& other) const;

 private:
  GridPtr grid_;
  int level_;
  std::vector<std::int64_t> coords_;
};

/// Knobs of the dyadic combinatorics: r, epsilon, gamma, gamma', C0, ell_max.
struct GoodnessParams {
  int r = 4;
  double epsilon = 0.5;
  double gamma = 4.0;
  double gamma_prime = 2.5;
  double c0 = 1.0;
  int ell_max = 2;

  /// Checks r >= 1, 0 < epsilon < 1, gamma >= 2, 2 < gamma' < gamma, C0 > 0,
  /// ell_max >= 0.
  void validate() const;
  /// gamma >= sqrt(2 / (n - alpha)), required by the end-region reversal.
  bool gamma_admissible(int n, double alpha) const;
  /// Upper threshold on C0 that keeps the cross term of the axial reversal
  /// small: C0 < (gamma / (2 gamma')) (n - alpha) / (n + 1 - alpha).
  bool c0_below_cross_threshold(int n, double alpha) const;
  /// (n + 1 - alpha)(gamma' / (gamma C0) + (gamma' / gamma)^2) < n - alpha.
  bool transverse_threshold(int n, double alpha) const;
};

/// Euclidean distance from the closed box of J to the boundary of the closed
/// box of K; J must be inside K (returns 0 otherwise).
double distance_to_boundary(const Cube& inner, const Cube& outer);

bool is_deeply_embedded(const Cube& inner, const Cube& outer, const GoodnessParams& p);
/// J inside K with l(J) > 2^-r l(K) (strict).
bool is_nearby(const Cube& inner, const Cube& outer, const GoodnessParams& p);
/// For every supercube I with J strictly inside I inside the root, either
/// l(J) >= 2^-r l(I) (non-strict) or J is deeply embedded in I.
bool is_good(const Cube& cube, const GoodnessParams& p);

/// M_{r-deep}(K) restricted to cubes that contain at least one of the given
/// support points, with levels capped at grid.level_max. Output is sorted.
std::vector<Cube> maximal_deep_subcubes(const Cube& outer, const GoodnessParams& p,
                                        std::span<const Point> support);
/// Unrestricted M_{r-deep}(K) down to grid.level_max (exponential in depth).
std::vector<Cube> maximal_deep_subcubes(const Cube& outer, const GoodnessParams& p);

/// M^ell_{r-deep}(K): cubes of M_{r-deep}(pi^ell K) inside some cube of
/// M_{r-deep}(K). Throws std::out_of_range if pi^ell K is above the root.
std::vector<Cube> refined_deep_subcubes(const Cube& outer, int ell, const GoodnessParams& p,
                                        std::span<const Point> support);
std::vector<Cube> refined_deep_subcubes(const Cube& outer, int ell, const GoodnessParams& p);

/// beta = max_y sum_J 1_{gamma J}(y), evaluated exactly on the arrangement
/// cells of the dilates. `outer` only fixes the dimension.
int overlap_constant(const Cube& outer, std::span<const Cube> family, double gamma);

enum class Region { InsideJStar, End, Side, OutsideI };

const char* to_string(Region region);

/// Splits I into gamma J, the end cone around the x1 direction through c_J,
/// and the remaining side region.
Region end_side_classify(const Cube& outer, const Cube& inner, double gamma,
                         std::span<const double> y);

/// A line {point + t * direction}, direction a unit vector.
struct LineSpec {
  Point point;
  Point direction;

  void validate() const;
  /// Parameter t of the orthogonal projection of y onto the line.
  double project(std::span<const double> y) const;
  double distance(std::span<const double> y) const;
  /// The x1-axis in R^n.
  static LineSpec axis(int n);
};

/// Closed interval [lo, hi] of line parameters.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool intersects(double a, double b) const { return a <= hi && lo <= b; }
};

/// Sh(y; gamma): interval on the line of length 2 gamma dist(y, L) centred at
/// the foot of the perpendicular from y.
Interval carleson_shadow(std::span<const double> y, double gamma, const LineSpec& line);

}  // namespace tw
