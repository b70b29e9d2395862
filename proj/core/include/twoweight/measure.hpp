#pragma once

// Finitely atomic measures, restrictions and means.

#include <functional>
#include <span>
#include <vector>

#include "twoweight/geometry.hpp"
#include "twoweight/numeric.hpp"

namespace tw {

struct Atom {
  Point location;
  double mass = 0.0;
};

/// Immutable list of weighted atoms with distinct locations.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(int dimension) : dimension_(dimension) {}
  /// Validates positivity, finiteness, dimension and distinctness.
  DiscreteMeasure(int dimension, std::vector<Atom> atoms);

  int dimension() const { return dimension_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  std::vector<Point> locations() const;
  double total() const;

 private:
  int dimension_ = 0;
  std::vector<Atom> atoms_;
};

/// |Q|_mu with half-open membership.
double total_mass(const DiscreteMeasure& mu, const Cube& q);

using PointPredicate = std::function<bool(std::span<const double>)>;

DiscreteMeasure restrict(const DiscreteMeasure& mu, const PointPredicate& region);

/// Throws ValidationError on an exact location shared by sigma and omega;
/// otherwise returns the least sigma-omega distance (+inf if either is empty).
double check_no_common_points(const DiscreteMeasure& sigma, const DiscreteMeasure& omega);

/// E_Q^mu x_j. Throws std::domain_error when |Q|_mu = 0.
double mean(const DiscreteMeasure& mu, const Cube& q, int j);

/// True if every atom lies within `tol` (relative to the atom scale) of the line.
bool is_supported_on_line(const DiscreteMeasure& mu, const LineSpec& line, double tol = 1e-12);

}  // namespace tw
