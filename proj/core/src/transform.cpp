#include "twoweight/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tw {

void KernelParams::validate() const {
  if (n < 1) throw ValidationError("kernel: n must be >= 1");
  if (!(alpha >= 0.0 && alpha < n)) throw ValidationError("kernel: alpha must lie in [0, n)");
  if (!(c_norm > 0.0) || !std::isfinite(c_norm))
    throw ValidationError("kernel: c_norm must be positive");
  if (flipped_component >= n) throw ValidationError("kernel: flipped_component out of range");
}

Truncation Truncation::make(double delta, double r_outer, int n, double alpha) {
  Truncation t{delta, r_outer, r_outer * (n - alpha + 1.0) / (n - alpha)};
  t.validate(n, alpha);
  return t;
}

void Truncation::validate(int n, double alpha) const {
  if (!(delta > 0.0) || !(r_outer > delta) || !std::isfinite(r_outer))
    throw ValidationError("truncation: need 0 < delta < R");
  const double s = r_outer * (n - alpha + 1.0) / (n - alpha);
  if (std::abs(s_outer - s) > 1e-12 * s)
    throw ValidationError("truncation: S must equal R (n - alpha + 1) / (n - alpha)");
}

Point riesz_kernel(std::span<const double> w, const KernelParams& p) {
  const double r = norm(w);
  if (r == 0.0) throw std::domain_error("riesz kernel is singular at w = 0");
  const double scale = p.c_norm / std::pow(r, p.n + 1.0 - p.alpha);
  Point k(w.size());
  for (std::size_t l = 0; l < w.size(); ++l) k[l] = scale * w[l];
  if (p.flipped_component >= 0) k[p.flipped_component] = -k[p.flipped_component];
  return k;
}

double truncation_profile(double rdist, const Truncation& t, const KernelParams& p) {
  const double e = p.alpha - p.n;
  if (rdist >= t.s_outer) return 0.0;
  if (rdist > t.r_outer) {
    const double v = std::pow(t.r_outer, e);
    return v + e * v / t.r_outer * (rdist - t.r_outer);
  }
  if (rdist >= t.delta) return std::pow(rdist, e);
  const double v = std::pow(t.delta, e);
  return v + e * v / t.delta * (rdist - t.delta);
}

void truncated_kernel(std::span<const double> w, const Truncation& t, const KernelParams& p,
                      std::span<double> out) {
  const double r = norm(w);
  if (r == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double scale = p.c_norm * truncation_profile(r, t, p) / r;
  for (std::size_t l = 0; l < w.size(); ++l) out[l] = scale * w[l];
  if (p.flipped_component >= 0) out[p.flipped_component] = -out[p.flipped_component];
}

std::vector<double> apply_transform(std::span<const double> f, const DiscreteMeasure& sigma,
                                    std::span<const Point> eval_points, const Truncation& t,
                                    const KernelParams& p, unsigned workers) {
  const std::size_t n = static_cast<std::size_t>(p.n);
  const std::size_t m = sigma.size();
  if (f.size() != m) throw std::invalid_argument("apply_transform: f has wrong length");
  std::vector<double> out(eval_points.size() * n, 0.0);
  parallel_for(eval_points.size(), workers, [&](std::size_t i) {
    const Point& x = eval_points[i];
    std::vector<double> terms(n * m);
    Point w(n), k(n);
    for (std::size_t j = 0; j < m; ++j) {
      const Atom& a = sigma[j];
      for (std::size_t l = 0; l < n; ++l) w[l] = x[l] - a.location[l];
      truncated_kernel(w, t, p, k);
      const double weight = f[j] * a.mass;
      for (std::size_t l = 0; l < n; ++l) terms[l * m + j] = k[l] * weight;
    }
    for (std::size_t l = 0; l < n; ++l)
      out[i * n + l] = pairwise_sum(std::span<const double>(terms).subspan(l * m, m));
  });
  return out;
}

double poisson_standard_term(double side, double dist, const KernelParams& p) {
  return side / std::pow(side + dist, p.n + 1.0 - p.alpha);
}

double poisson_reproducing_term(double side, double dist, const KernelParams& p) {
  const double q = side / ((side + dist) * (side + dist));
  return std::pow(q, p.n - p.alpha);
}

double poisson_standard(const Cube& q, const DiscreteMeasure& mu, const KernelParams& p) {
  const Point c = q.center();
  const double side = q.side();
  std::vector<double> terms;
  terms.reserve(mu.size());
  for (const Atom& a : mu.atoms())
    terms.push_back(a.mass * poisson_standard_term(side, distance(a.location, c), p));
  return pairwise_sum(terms);
}

double poisson_reproducing(const Cube& q, const DiscreteMeasure& mu, const KernelParams& p) {
  const Point c = q.center();
  const double side = q.side();
  std::vector<double> terms;
  terms.reserve(mu.size());
  for (const Atom& a : mu.atoms())
    terms.push_back(a.mass * poisson_reproducing_term(side, distance(a.location, c), p));
  return pairwise_sum(terms);
}

Truncation default_truncation(const DiscreteMeasure& sigma, const DiscreteMeasure& omega,
                              int n, double alpha) {
  const double dmin = check_no_common_points(sigma, omega);
  double diam = 0.0;
  std::vector<const Point*> all;
  for (const Atom& a : sigma.atoms()) all.push_back(&a.location);
  for (const Atom& a : omega.atoms()) all.push_back(&a.location);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) diam = std::max(diam, distance(*all[i], *all[j]));
  if (!std::isfinite(dmin) || diam <= 0.0) return Truncation::make(1.0, 2.0, n, alpha);
  return Truncation::make(0.5 * dmin, 2.0 * diam, n, alpha);
}

}  // namespace tw
