#pragma once

// Fractional Riesz kernels, tangent line truncations, truncated transforms of
// atomic measures, and the standard and reproducing Poisson integrals.

#include <span>
#include <vector>

#include "twoweight/geometry.hpp"
#include "twoweight/measure.hpp"

namespace tw {

struct KernelParams {
  int n = 2;
  double alpha = 0.0;
  double c_norm = 1.0;
  /// Fault injection for mutation tests: when >= 0, the sign of this kernel
  /// component (0-based) is flipped. Never set in normal runs.
  int flipped_component = -1;

  void validate() const;
};

/// psi_{delta,R}: r^(alpha-n) on [delta, R], tangent lines on (0, delta) and
/// (R, S), zero from S on.
struct Truncation {
  double delta = 0.0;
  double r_outer = 0.0;
  double s_outer = 0.0;

  /// Fills in S = R (n - alpha + 1) / (n - alpha), the unique point where the
  /// tangent line at R reaches zero.
  static Truncation make(double delta, double r_outer, int n, double alpha);
  void validate(int n, double alpha) const;
};

/// c w^l / |w|^(n+1-alpha) for every component l. Throws std::domain_error at w = 0.
Point riesz_kernel(std::span<const double> w, const KernelParams& p);

double truncation_profile(double rdist, const Truncation& t, const KernelParams& p);

/// c Omega_l(w) psi(|w|) written into out[0..n); zero at w = 0.
void truncated_kernel(std::span<const double> w, const Truncation& t, const KernelParams& p,
                      std::span<double> out);

/// R(f sigma) at each evaluation point; the result is flattened with n
/// components per point. Per-point sums use a fixed pairwise order, so the
/// output does not depend on `workers`.
std::vector<double> apply_transform(std::span<const double> f, const DiscreteMeasure& sigma,
                                    std::span<const Point> eval_points, const Truncation& t,
                                    const KernelParams& p, unsigned workers = 1);

/// Single-atom Poisson weights for a cube of side `side` at distance `dist`
/// from its centre.
double poisson_standard_term(double side, double dist, const KernelParams& p);
double poisson_reproducing_term(double side, double dist, const KernelParams& p);

double poisson_standard(const Cube& q, const DiscreteMeasure& mu, const KernelParams& p);
double poisson_reproducing(const Cube& q, const DiscreteMeasure& mu, const KernelParams& p);

/// delta = d_min / 2 and R = 2 diam(supp sigma u supp omega). With these the
/// truncated kernel agrees with the raw kernel on every sigma-omega pair.
Truncation default_truncation(const DiscreteMeasure& sigma, const DiscreteMeasure& omega,
                              int n, double alpha);

}  // namespace tw
