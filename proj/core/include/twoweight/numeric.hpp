#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tw {

/// A point (or vector) in R^n. The dimension is carried by the size.
using Point = std::vector<double>;

/// Raised for malformed inputs: bad parameters, coincident atoms, schema errors.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);

/// Pairwise (cascade) summation in a fixed order. The result depends only on
/// the sequence of terms, never on how the caller scheduled their production.
double pairwise_sum(std::span<const double> terms);

/// splitmix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Small deterministic generator (xoshiro256**) with a portable real mapping,
/// so that seeded scenarios are byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t s_[4];
};

/// Worker count used when the caller passes 0: $TWOWEIGHT_WORKERS, else 1.
unsigned default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// visited exactly once; callers write into pre-sized slots so the outcome is
/// independent of scheduling. Exceptions from any worker are rethrown.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace tw
