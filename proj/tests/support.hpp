#pragma once

#include <cmath>
#include <vector>

#include "twoweight/constants.hpp"
#include "twoweight/geometry.hpp"
#include "twoweight/measure.hpp"
#include "twoweight/scenario.hpp"

namespace tw::testing {

/// The unshifted grid with root [0, 2^-level_min)^n.
inline GridPtr standard_grid(int n, int level_min, int level_max) {
  return make_grid(Point(n, 0.0), level_min, level_max, Point(n, 0.0));
}

inline DiscreteMeasure unit_atoms(int n, const std::vector<Point>& at) {
  std::vector<Atom> atoms;
  for (const auto& p : at) atoms.push_back({p, 1.0});
  return DiscreteMeasure(n, atoms);
}

/// Scenario on the single standard grid with root cube at level_min
/// anchored at the origin.
inline Scenario standard_scenario(int n, double alpha, DiscreteMeasure sigma,
                                  DiscreteMeasure omega, int level_min, int level_max) {
  Scenario s;
  s.n = n;
  s.alpha = alpha;
  s.sigma = std::move(sigma);
  s.omega = std::move(omega);
  s.grids.level_min = level_min;
  s.grids.level_max = level_max;
  s.grids.shifts = {Point(n, 0.0)};
  s.grids.anchor = Point(n, 0.0);
  return s;
}

/// sigma = delta_(0,0), omega = delta_(3,4), unit masses, n = 2, alpha = 1,
/// one standard grid whose root [0, 8)^2 holds both atoms.
inline Scenario single_atom_pair() {
  return standard_scenario(2, 1.0, unit_atoms(2, {{0.0, 0.0}}), unit_atoms(2, {{3.0, 4.0}}), -3,
                           3);
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace tw::testing
