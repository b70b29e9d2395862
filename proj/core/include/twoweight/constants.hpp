#pragma once

// Every two-weight constant as a maximum over a finite family of shifted
// dyadic grids, with the maximising cube (or cube pair, or partition) kept as
// a witness. All values are lower bounds for the corresponding suprema over
// all cubes and grids.

#include <cstdint>
#include <string>
#include <vector>

#include "twoweight/geometry.hpp"
#include "twoweight/scenario.hpp"

namespace tw {

enum class Direction { Forward, Backward };

const char* to_string(Direction d);

/// A cube identified by its grid's position in Scenario::build_grids().
struct CubeRef {
  int grid = -1;
  int level = 0;
  std::vector<std::int64_t> coords;

  static CubeRef of(int grid, const Cube& q);
  Cube resolve(const std::vector<GridPtr>& grids) const;
  bool operator==(const CubeRef&) const = default;
};

struct Witness {
  /// Q for one-cube constants, (Q, Q') for WBP, I for energies.
  std::vector<CubeRef> cubes;
  /// Energy witnesses only: the refinement depth and the pieces I_r that
  /// carry omega-mass (pieces without it contribute nothing and are omitted).
  int ell = -1;
  std::vector<CubeRef> partition;
  std::string strategy;

  bool empty() const { return cubes.empty(); }
};

struct ConstantRecord {
  std::string name;
  double value = 0.0;
  Witness witness;
  std::string family;
  std::string strategy;
  double runtime_ms = 0.0;
};

/// Sampling plan for the subpartitions {I_r} of I in the energy functionals.
struct PartitionStrategy {
  bool trivial = true;
  int uniform_depth = 3;
  int random_samples = 8;
  std::uint64_t seed = 1;
  double split_probability = 0.5;
  bool greedy = true;
  /// Exact maximisation over all dyadic partitions down to level_max by
  /// dynamic programming (the functional is additive over pieces).
  bool dp = true;

  void validate() const;
  std::string describe() const;
};

struct ConstantsOptions {
  PartitionStrategy partitions;
  unsigned workers = 1;
  /// When false, runtime_ms is reported as 0 so that output bytes are stable.
  bool timing = false;
};

struct ConstantsReport {
  std::vector<ConstantRecord> records;

  const ConstantRecord& get(const std::string& name) const;
  double value(const std::string& name) const { return get(name).value; }
};

struct Valued {
  double value = 0.0;
  Witness witness;
};

Valued a2_classical(const Scenario& s);
Valued a2_onesided(const Scenario& s, Direction d);
Valued testing_constant(const Scenario& s, Direction d);
/// C <= 0 selects the scenario's comparability constant.
Valued wbp_constant(const Scenario& s, double comparability = 0.0);
double op_norm(const Scenario& s);
/// Norm of the vector of adjoints g -> (R_l^*(g omega))_l from L^2(omega) to
/// L^2(sigma; R^n), the operator the backward testing constant tests. For
/// n >= 2 it can exceed op_norm, by at most a factor sqrt(n).
double op_norm_adjoint(const Scenario& s);

/// Best value found by each enabled strategy, in a fixed order:
/// trivial, uniform, random, greedy, dp.
std::vector<Valued> energy_by_strategy(const Scenario& s, Direction d, bool plug,
                                       const PartitionStrategy& ps, unsigned workers = 1);
Valued energy_constant(const Scenario& s, Direction d, const PartitionStrategy& ps,
                       unsigned workers = 1);
Valued energy_plug_constant(const Scenario& s, Direction d, const PartitionStrategy& ps,
                            unsigned workers = 1);

/// The energy functional at one (grid, I, ell, partition) point, before the
/// square root is taken: (1/|I|_sigma) sum_r sum_{J in M^ell(I_r)} ... .
double energy_functional(const Scenario& s, Direction d, bool plug, const CubeRef& outer, int ell,
                         const std::vector<CubeRef>& pieces);

/// Union over the pieces of M^ell_{r-deep}(I_r), restricted to cubes holding
/// atoms of the second measure of the direction (omega when forward).
std::vector<Cube> energy_decomposition(const Scenario& s, Direction d,
                                       const std::vector<GridPtr>& grids, const Witness& w);

/// Every partition the strategy visits at one outer cube I, for each ell, as
/// witnesses tagged with the strategy name.
std::vector<Witness> energy_partitions(const Scenario& s, Direction d, bool plug,
                                       const CubeRef& outer, const PartitionStrategy& ps);

/// beta: the largest overlap of the dilates gamma J over J in M^ell(I), taken
/// over every sigma- or omega-occupied I and 0 <= ell <= ell_max.
Valued overlap_beta(const Scenario& s);

/// All constants in their report order.
ConstantsReport compute_constants(const Scenario& s, const ConstantsOptions& opt);

/// Cubes of `grid` at levels [level_min, level_max] inside the root that hold
/// at least one atom of any of the given measures, in (level, coords) order.
std::vector<Cube> occupied_cubes(const GridPtr& grid, const std::vector<const DiscreteMeasure*>& mus);

}  // namespace tw
