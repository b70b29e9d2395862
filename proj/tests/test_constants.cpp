#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "support.hpp"
#include "twoweight/constants.hpp"
#include "twoweight/energy.hpp"
#include "twoweight/transform.hpp"
#include "twoweight/verify.hpp"

using namespace tw;
using tw::testing::close_rel;
using tw::testing::single_atom_pair;
using tw::testing::standard_scenario;
using tw::testing::unit_atoms;

namespace {

Scenario small_generated(std::uint64_t seed, int atoms, double alpha) {
  GeneratorConfig g;
  g.alpha = alpha;
  g.atoms_sigma = atoms;
  g.atoms_omega = atoms;
  g.level_max = 6;
  return canonicalize_line(generate_scenario(seed, g));
}

Scenario scaled_sigma(const Scenario& s, double t) {
  Scenario out = s;
  std::vector<Atom> atoms = s.sigma.atoms();
  for (auto& a : atoms) a.mass *= t;
  out.sigma = DiscreteMeasure(s.n, atoms);
  return out;
}

// Largest singular value by power iteration on A^T A with the raw kernel.
double power_iteration_norm(const Scenario& s) {
  const int n = s.n;
  const std::size_t rows = s.omega.size() * n, cols = s.sigma.size();
  KernelParams kp{n, s.alpha, s.c_norm, -1};
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (std::size_t i = 0; i < s.omega.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      Point w(n);
      for (int k = 0; k < n; ++k) w[k] = s.omega[i].location[k] - s.sigma[j].location[k];
      const auto kv = riesz_kernel(w, kp);
      for (int l = 0; l < n; ++l)
        a[i * n + l][j] = std::sqrt(s.omega[i].mass * s.sigma[j].mass) * kv[l];
    }
  std::vector<double> x(cols, 1.0), y(rows);
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    for (std::size_t r = 0; r < rows; ++r) {
      y[r] = 0.0;
      for (std::size_t c = 0; c < cols; ++c) y[r] += a[r][c] * x[c];
    }
    std::vector<double> z(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) z[c] += a[r][c] * y[r];
    const double nz = norm(z);
    if (nz == 0.0) return 0.0;
    double dot = 0.0;
    for (std::size_t c = 0; c < cols; ++c) dot += z[c] * x[c];
    lambda = dot / (norm(x) * norm(x));
    for (std::size_t c = 0; c < cols; ++c) x[c] = z[c] / nz;
  }
  return std::sqrt(lambda);
}

// All ways to cut `q` into dyadic pieces, keeping only pieces that hold an
// atom of `mu`: a piece without one contributes nothing to the functional.
std::vector<std::vector<Cube>> occupied_partitions(const Cube& q, const DiscreteMeasure& mu) {
  std::vector<std::vector<Cube>> out{{q}};
  if (q.level() >= q.grid().level_max) return out;
  std::vector<std::vector<std::vector<Cube>>> per_child;
  for (const Cube& c : q.children())
    if (total_mass(mu, c) > 0.0) per_child.push_back(occupied_partitions(c, mu));
  std::vector<std::vector<Cube>> combos{{}};
  for (const auto& options : per_child) {
    std::vector<std::vector<Cube>> next;
    for (const auto& head : combos)
      for (const auto& tail : options) {
        auto joined = head;
        joined.insert(joined.end(), tail.begin(), tail.end());
        next.push_back(std::move(joined));
      }
    combos = std::move(next);
  }
  out.insert(out.end(), combos.begin(), combos.end());
  return out;
}

// The forward energy functional written out directly.
double forward_energy_oracle(const Scenario& s, const Cube& i, int ell, const std::vector<Cube>& pieces) {
  const double mass = total_mass(s.sigma, i);
  const auto support = s.omega.locations();
  double sum = 0.0;
  for (const Cube& piece : pieces) {
    if (piece.level() - ell < piece.grid().level_min) continue;
    for (const Cube& j : refined_deep_subcubes(piece, ell, s.goodness, support)) {
      const Box hole = j.dilate(s.goodness.gamma);
      double p = 0.0;
      for (const Atom& a : s.sigma.atoms())
        if (i.contains(a.location) && !hole.contains(a.location))
          p += a.mass * j.side() /
               std::pow(j.side() + distance(a.location, j.center()), s.n + 1 - s.alpha);
      sum += (p / j.side()) * (p / j.side()) * projection_norm_subgood(j, s.omega, s.goodness);
    }
  }
  return sum / mass;
}

}  // namespace

TEST(ClosedForms, SingleAtomPair) {
  const Scenario s = single_atom_pair();
  EXPECT_NEAR(testing_constant(s, Direction::Forward).value, 0.2, 1e-12);
  EXPECT_NEAR(testing_constant(s, Direction::Backward).value, 0.2, 1e-12);
  EXPECT_NEAR(op_norm(s), 0.2, 1e-12);
  EXPECT_NEAR(op_norm_adjoint(s), 0.2, 1e-12);
  EXPECT_NEAR(wbp_constant(s).value, 0.2, 1e-12);
}

TEST(ClosedForms, DefaultFamilyMissesThePair) {
  // No cube of the default family at level 0 holds both atoms.
  Scenario s = single_atom_pair();
  s.grids = GridFamily{};
  EXPECT_EQ(testing_constant(s, Direction::Forward).value, 0.0);
  EXPECT_TRUE(testing_constant(s, Direction::Forward).witness.empty());
  EXPECT_NEAR(op_norm(s), 0.2, 1e-12);
}

TEST(A2, ClassicalExample) {
  Scenario s = standard_scenario(2, 0.0, unit_atoms(2, {{0.0, 0.0}}), unit_atoms(2, {{1.0, 0.0}}),
                                 -1, 3);
  const auto v = a2_classical(s);
  EXPECT_DOUBLE_EQ(v.value, 1.0 / 16.0);
  ASSERT_EQ(v.witness.cubes.size(), 1u);
  EXPECT_EQ(v.witness.cubes[0].level, -1);
  EXPECT_EQ(v.witness.cubes[0].coords, (std::vector<std::int64_t>{0, 0}));
  s.sigma = DiscreteMeasure(2, {{{0.0, 0.0}, 2.0}});
  s.omega = DiscreteMeasure(2, {{{1.0, 0.0}, 2.0}});
  EXPECT_DOUBLE_EQ(a2_classical(s).value, 4.0 / 16.0);
}

TEST(A2, EmptyMeasureGivesZero) {
  Scenario s = single_atom_pair();
  s.omega = DiscreteMeasure(2);
  EXPECT_EQ(a2_classical(s).value, 0.0);
  EXPECT_EQ(a2_onesided(s, Direction::Forward).value, 0.0);
  EXPECT_EQ(testing_constant(s, Direction::Forward).value, 0.0);
  EXPECT_EQ(wbp_constant(s).value, 0.0);
  EXPECT_EQ(op_norm(s), 0.0);
}

TEST(A2, OneSidedDominatesClassical) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Scenario s = small_generated(seed, 12, 0.25 * static_cast<double>(seed % 4));
    const double c = std::pow(1 + std::sqrt(2.0) / 2, -2 * (2 - s.alpha));
    const double a2 = a2_classical(s).value;
    EXPECT_GE(a2_onesided(s, Direction::Forward).value, c * a2 * (1 - 1e-12));
    EXPECT_GE(a2_onesided(s, Direction::Backward).value, c * a2 * (1 - 1e-12));
  }
}

TEST(A2, OneSidedPairWitness) {
  // Two atoms at distance 1; the oracle below enumerates every cube of the
  // family holding omega and keeps the first maximiser in (grid, level,
  // coords) order.
  Scenario s = standard_scenario(2, 0.5, unit_atoms(2, {{0.25, 0.25}}),
                                 unit_atoms(2, {{1.25, 0.25}}), -1, 4);
  const auto grids = s.build_grids();
  const auto kp = s.kernel();
  double best = 0.0;
  CubeRef arg;
  for (const Cube& q : occupied_cubes(grids[0], {&s.omega})) {
    const double v = poisson_reproducing(q, s.sigma, kp) * total_mass(s.omega, q) /
                     std::pow(q.volume(), 1 - s.alpha / 2);
    if (v > best) {
      best = v;
      arg = CubeRef::of(0, q);
    }
  }
  const auto got = a2_onesided(s, Direction::Forward);
  EXPECT_NEAR(got.value, best, 1e-14 * best);
  ASSERT_EQ(got.witness.cubes.size(), 1u);
  EXPECT_EQ(got.witness.cubes[0], arg);
}

TEST(Wbp, SinglePairExample) {
  Scenario s = standard_scenario(2, 1.0, unit_atoms(2, {{0.5, 0.5}}), unit_atoms(2, {{1.5, 0.5}}),
                                 -2, 3);
  const auto v = wbp_constant(s, 1.0);
  EXPECT_NEAR(v.value, 1.0, 1e-15);
  ASSERT_EQ(v.witness.cubes.size(), 2u);
  EXPECT_EQ(v.witness.cubes[0].level, 0);
  EXPECT_EQ(v.witness.cubes[0].coords, (std::vector<std::int64_t>{1, 0}));
  EXPECT_EQ(v.witness.cubes[1].coords, (std::vector<std::int64_t>{0, 0}));
}

TEST(OpNorm, MatchesPowerIteration) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GeneratorConfig g;
    g.alpha = 0.3 * static_cast<double>(seed % 4);
    g.atoms_sigma = 2 + static_cast<int>(seed % 9);
    g.atoms_omega = 10 - static_cast<int>(seed % 7);
    g.on_line = seed % 2 ? LineRole::Omega : LineRole::None;
    const Scenario s = generate_scenario(seed, g);
    const double oracle = power_iteration_norm(s);
    EXPECT_NEAR(op_norm(s), oracle, 1e-9 * oracle) << "seed " << seed;
  }
}

TEST(OpNorm, RejectsCommonPointMass) {
  Scenario s = single_atom_pair();
  s.omega = unit_atoms(2, {{0.0, 0.0}});
  EXPECT_THROW(op_norm(s), ValidationError);
}

TEST(BackwardTesting, CanExceedForwardNorm) {
  // omega = delta_0, sigma at -e1 and -e2: R maps L^2(sigma) isometrically,
  // but the adjoint family has norm sqrt(2).
  Scenario s = standard_scenario(2, 1.0, unit_atoms(2, {{-1.0, 0.0}, {0.0, -1.0}}),
                                 unit_atoms(2, {{0.0, 0.0}}), -2, 3);
  s.grids.shifts = {{0.5, 0.5}};
  EXPECT_NEAR(op_norm(s), 1.0, 1e-12);
  EXPECT_NEAR(op_norm_adjoint(s), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(testing_constant(s, Direction::Backward).value, std::sqrt(2.0), 1e-12);
  EXPECT_LE(testing_constant(s, Direction::Backward).value, op_norm_adjoint(s) * (1 + 1e-12));
}

TEST(Inequalities, TestingAndWbpBelowNorms) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Scenario s = small_generated(seed, 15, 0.5);
    const double nf = op_norm(s), nb = op_norm_adjoint(s);
    EXPECT_LE(testing_constant(s, Direction::Forward).value, nf * (1 + 1e-9));
    EXPECT_LE(testing_constant(s, Direction::Backward).value, nb * (1 + 1e-9));
    EXPECT_LE(wbp_constant(s).value, std::min(nf, nb) * (1 + 1e-9));
    EXPECT_LE(nb, std::sqrt(2.0) * nf * (1 + 1e-9));
  }
}

TEST(Scaling, SigmaMassHomogeneity) {
  const Scenario s = small_generated(3, 10, 0.5);
  const double t = 2.5;
  const Scenario st = scaled_sigma(s, t);
  PartitionStrategy ps;
  EXPECT_TRUE(close_rel(op_norm(st), std::sqrt(t) * op_norm(s), 1e-12));
  EXPECT_TRUE(close_rel(testing_constant(st, Direction::Forward).value,
                        std::sqrt(t) * testing_constant(s, Direction::Forward).value, 1e-12));
  EXPECT_TRUE(close_rel(a2_classical(st).value, t * a2_classical(s).value, 1e-12));
  const double e = energy_constant(s, Direction::Forward, ps).value;
  EXPECT_GT(e, 0.0);
  EXPECT_TRUE(close_rel(energy_constant(st, Direction::Forward, ps).value, std::sqrt(t) * e, 1e-12));
}

TEST(Energy, PlugDominatesAndWitnessesReproduce) {
  PartitionStrategy ps;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Scenario s = small_generated(seed, 14, 0.5 * static_cast<double>(seed % 3));
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      const auto e = energy_constant(s, d, ps);
      const auto plug = energy_plug_constant(s, d, ps);
      EXPECT_LE(e.value, plug.value * (1 + 1e-12));
      for (const auto* v : {&e, &plug}) {
        if (v->witness.empty()) continue;
        const double f = energy_functional(s, d, v == &plug, v->witness.cubes[0], v->witness.ell,
                                           v->witness.partition);
        EXPECT_NEAR(std::sqrt(f), v->value, 1e-12 * v->value);
      }
    }
  }
}

TEST(Energy, SingleOmegaAtomOrEmptySigmaGivesZero) {
  GeneratorConfig g;
  g.atoms_omega = 1;
  g.atoms_sigma = 10;
  const Scenario s = canonicalize_line(generate_scenario(4, g));
  PartitionStrategy ps;
  EXPECT_EQ(energy_constant(s, Direction::Forward, ps).value, 0.0);
  EXPECT_EQ(energy_plug_constant(s, Direction::Forward, ps).value, 0.0);
  Scenario e = s;
  e.sigma = DiscreteMeasure(2);
  EXPECT_EQ(energy_constant(e, Direction::Forward, ps).value, 0.0);
}

TEST(Energy, DynamicProgramMatchesExhaustivePartitions) {
  // Two omega atoms on the axis and one sigma atom above it. The axis sits
  // off every cube face (shift 5/12 on the second axis).
  Scenario s;
  s.n = 2;
  s.alpha = 0.5;
  s.sigma = DiscreteMeasure(2, {{{8.8, 0.3}, 1.5}});
  s.omega = DiscreteMeasure(2, {{{8.3, 0.0}, 1.0}, {{8.35, 0.0}, 2.0}});
  s.grids.level_min = 0;
  s.grids.level_max = 4;
  s.grids.shifts = {{0.0, 5.0 / 12.0}};
  s.grids.anchor = Point{8.0, 0.0};
  s.goodness.r = 3;
  const auto grids = s.build_grids();
  double oracle = 0.0;
  for (const Cube& i : occupied_cubes(grids[0], {&s.sigma}))
    for (int ell = 0; ell <= s.goodness.ell_max; ++ell)
      for (const auto& pieces : occupied_partitions(i, s.omega))
        oracle = std::max(oracle, forward_energy_oracle(s, i, ell, pieces));
  oracle = std::sqrt(oracle);
  ASSERT_GT(oracle, 0.0);
  PartitionStrategy exact;
  exact.trivial = false;
  exact.uniform_depth = 0;
  exact.random_samples = 0;
  exact.greedy = false;
  exact.dp = true;
  EXPECT_NEAR(energy_constant(s, Direction::Forward, exact).value, oracle, 1e-12 * oracle);
  PartitionStrategy all;
  EXPECT_NEAR(energy_constant(s, Direction::Forward, all).value, oracle, 1e-12 * oracle);
}

TEST(Energy, LargerPartitionSampleNeverDecreases) {
  const Scenario s = small_generated(9, 20, 1.0);
  PartitionStrategy few;
  few.uniform_depth = 0;
  few.random_samples = 0;
  few.greedy = false;
  few.dp = false;
  PartitionStrategy more = few;
  more.uniform_depth = 2;
  more.random_samples = 4;
  PartitionStrategy all;
  for (Direction d : {Direction::Forward, Direction::Backward}) {
    const double a = energy_constant(s, d, few).value;
    const double b = energy_constant(s, d, more).value;
    const double c = energy_constant(s, d, all).value;
    EXPECT_LE(a, b);
    EXPECT_LE(b, c);
  }
}

TEST(Family, MoreGridsNeverDecrease) {
  Scenario s = small_generated(5, 12, 0.5);
  Scenario one = s;
  one.grids.shifts = {default_grid_shifts(2)[1]};
  one.grids.anchor = s.grids.anchor;
  if (!one.grids.anchor) {
    const auto g = s.build_grids();
    one.grids.anchor = Cube::root_of(g[0]).center();
    s.grids.anchor = one.grids.anchor;
  }
  EXPECT_LE(a2_classical(one).value, a2_classical(s).value);
  EXPECT_LE(testing_constant(one, Direction::Forward).value,
            testing_constant(s, Direction::Forward).value);
  EXPECT_LE(wbp_constant(one).value, wbp_constant(s).value);
}

TEST(Report, AllConstantsPresentAndNonNegative) {
  const Scenario s = small_generated(2, 10, 0.5);
  ConstantsOptions opt;
  const auto rep = compute_constants(s, opt);
  const std::vector<std::string> names{"a2_classical",        "a2_forward",       "a2_backward",
                                       "testing_forward",     "testing_backward", "wbp",
                                       "energy_forward",      "energy_backward",  "energy_plug_forward",
                                       "energy_plug_backward", "op_norm",         "op_norm_adjoint",
                                       "overlap_beta"};
  ASSERT_EQ(rep.records.size(), names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(rep.records[i].name, names[i]);
    EXPECT_GE(rep.records[i].value, 0.0);
    EXPECT_EQ(rep.records[i].runtime_ms, 0.0);
  }
  ConstantsOptions par = opt;
  par.workers = 4;
  const auto rep4 = compute_constants(s, par);
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(rep.records[i].value, rep4.records[i].value);
    EXPECT_EQ(rep.records[i].witness.cubes, rep4.records[i].witness.cubes);
  }
}
