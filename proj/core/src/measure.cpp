#include "twoweight/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace tw {

namespace {

std::string format_point(std::span<const double> x) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(int dimension, std::vector<Atom> atoms)
    : dimension_(dimension), atoms_(std::move(atoms)) {
  if (dimension_ < 1) throw ValidationError("measure dimension must be >= 1");
  for (const Atom& a : atoms_) {
    if (static_cast<int>(a.location.size()) != dimension_)
      throw ValidationError("atom has wrong dimension");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass))
      throw ValidationError("atom mass must be positive and finite");
    for (double v : a.location)
      if (!std::isfinite(v)) throw ValidationError("atom location must be finite");
  }
  std::vector<const Point*> sorted;
  sorted.reserve(atoms_.size());
  for (const Atom& a : atoms_) sorted.push_back(&a.location);
  std::sort(sorted.begin(), sorted.end(), [](const Point* a, const Point* b) { return *a < *b; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (*sorted[i] == *sorted[i - 1])
      throw ValidationError("repeated atom location " + format_point(*sorted[i]));
}

std::vector<Point> DiscreteMeasure::locations() const {
  std::vector<Point> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) out.push_back(a.location);
  return out;
}

double DiscreteMeasure::total() const {
  std::vector<double> m;
  m.reserve(atoms_.size());
  for (const Atom& a : atoms_) m.push_back(a.mass);
  return pairwise_sum(m);
}

double total_mass(const DiscreteMeasure& mu, const Cube& q) {
  std::vector<double> m;
  for (const Atom& a : mu.atoms())
    if (q.contains(a.location)) m.push_back(a.mass);
  return pairwise_sum(m);
}

DiscreteMeasure restrict(const DiscreteMeasure& mu, const PointPredicate& region) {
  std::vector<Atom> kept;
  for (const Atom& a : mu.atoms())
    if (region(a.location)) kept.push_back(a);
  return DiscreteMeasure(mu.dimension(), std::move(kept));
}

double check_no_common_points(const DiscreteMeasure& sigma, const DiscreteMeasure& omega) {
  if (!sigma.empty() && !omega.empty() && sigma.dimension() != omega.dimension())
    throw ValidationError("sigma and omega have different dimensions");
  double dmin = std::numeric_limits<double>::infinity();
  for (const Atom& a : sigma.atoms())
    for (const Atom& b : omega.atoms()) {
      if (a.location == b.location)
        throw ValidationError("sigma and omega share the point mass at " +
                              format_point(a.location));
      dmin = std::min(dmin, distance(a.location, b.location));
    }
  return dmin;
}

double mean(const DiscreteMeasure& mu, const Cube& q, int j) {
  std::vector<double> m, mx;
  for (const Atom& a : mu.atoms())
    if (q.contains(a.location)) {
      m.push_back(a.mass);
      mx.push_back(a.mass * a.location[j]);
    }
  const double total = pairwise_sum(m);
  if (total <= 0.0) throw std::domain_error("mean over a cube of zero mass");
  return pairwise_sum(mx) / total;
}

bool is_supported_on_line(const DiscreteMeasure& mu, const LineSpec& line, double tol) {
  for (const Atom& a : mu.atoms()) {
    const double scale = 1.0 + norm(a.location);
    if (line.distance(a.location) > tol * scale) return false;
  }
  return true;
}

}  // namespace tw
