#pragma once

// Haar martingale differences of the identity map x and the full, good and
// subgood projection norms built from them.

#include <span>
#include <vector>

#include "twoweight/geometry.hpp"
#include "twoweight/measure.hpp"

namespace tw {

/// Squared L^2(mu) norms of P_K x restricted to three Haar subsystems.
struct ProjectionNorms {
  double full = 0.0;
  double good = 0.0;
  double subgood = 0.0;
};

/// Recursion below a cube stops once it holds at most one atom, or at this
/// level, whichever comes first.
inline constexpr int kHaarDepthCap = 58;

/// ||Delta_J x||^2 = sum over children J' of |J'|_mu |E_J' x - E_J x|^2.
double haar_difference_norm_sq(const Cube& j, const DiscreteMeasure& mu);

/// Vector variance int_K |x - E_K x|^2 dmu.
double projection_norm_full(const Cube& k, const DiscreteMeasure& mu);

/// Sum of variances over the maximal good subcubes of K.
double projection_norm_subgood(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p);

/// Sum of Haar differences over all good J inside K, K included.
double projection_norm_good(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p);

ProjectionNorms projection_norms(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p);

/// Sum of haar_difference_norm_sq over every subcube of K down to atom
/// separation. Equal to projection_norm_full by orthogonality.
double haar_difference_total(const Cube& k, const DiscreteMeasure& mu);

/// Same as projection_norm_subgood, but only the atoms listed in `members`
/// are examined; they must include every atom of mu that lies in K.
double projection_norm_subgood(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p,
                               std::span<const std::size_t> members);

/// Variance of the listed atoms (all of them, no cube filter).
double variance_of(const DiscreteMeasure& mu, std::span<const std::size_t> members);

}  // namespace tw
