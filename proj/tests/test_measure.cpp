#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "twoweight/measure.hpp"
#include "twoweight/scenario.hpp"

using namespace tw;
using tw::testing::standard_grid;
using tw::testing::unit_atoms;

TEST(TotalMass, Examples) {
  auto g = standard_grid(2, 0, 4);
  const Cube q = Cube::root_of(g);
  EXPECT_EQ(total_mass(DiscreteMeasure(2, {{{0.5, 0.5}, 2.0}}), q), 2.0);
  EXPECT_EQ(total_mass(DiscreteMeasure(2, {{{1.0, 0.0}, 1.0}}), q), 0.0);
  EXPECT_EQ(total_mass(DiscreteMeasure(2, {{{0.1, 0.2}, 1.0}, {{0.7, 0.9}, 3.0}}), q), 4.0);
}

TEST(TotalMass, AdditiveOverChildren) {
  auto g = standard_grid(3, 0, 6);
  Rng rng(4);
  std::vector<Atom> atoms;
  for (int i = 0; i < 100; ++i)
    atoms.push_back({{rng.uniform(), rng.uniform(), rng.uniform()}, rng.uniform(0.1, 10.0)});
  const DiscreteMeasure mu(3, atoms);
  const Cube q = Cube::root_of(g).child(3);
  double sum = 0.0;
  for (const auto& c : q.children()) sum += total_mass(mu, c);
  EXPECT_NEAR(sum, total_mass(mu, q), 1e-12 * total_mass(mu, q));
}

TEST(Restrict, Examples) {
  const auto mu = DiscreteMeasure(1, {{{0.2}, 1.0}, {{0.8}, 2.0}});
  EXPECT_EQ(restrict(mu, [](auto) { return true; }).size(), 2u);
  EXPECT_TRUE(restrict(mu, [](auto) { return false; }).empty());
  const auto half = restrict(mu, [](std::span<const double> x) { return x[0] >= 0 && x[0] < 0.5; });
  ASSERT_EQ(half.size(), 1u);
  EXPECT_EQ(half[0].location[0], 0.2);
  const auto rest = restrict(mu, [](std::span<const double> x) { return !(x[0] < 0.5); });
  EXPECT_EQ(half.total() + rest.total(), mu.total());
}

TEST(CommonPoints, Examples) {
  const auto a = unit_atoms(2, {{0.0, 0.0}});
  const auto b = unit_atoms(2, {{3.0, 4.0}});
  EXPECT_DOUBLE_EQ(check_no_common_points(a, b), 5.0);
  EXPECT_THROW(check_no_common_points(unit_atoms(2, {{1.0, 2.0}}), unit_atoms(2, {{1.0, 2.0}})),
               ValidationError);
  EXPECT_EQ(check_no_common_points(a, DiscreteMeasure(2)), std::numeric_limits<double>::infinity());
}

TEST(Construction, RejectsBadAtoms) {
  EXPECT_THROW(DiscreteMeasure(2, {{{0.0, 0.0}, 0.0}}), ValidationError);
  EXPECT_THROW(DiscreteMeasure(2, {{{0.0}, 1.0}}), ValidationError);
  EXPECT_THROW(unit_atoms(2, {{1.0, 1.0}, {1.0, 1.0}}), ValidationError);
  EXPECT_THROW(DiscreteMeasure(1, {{{std::nan("")}, 1.0}}), ValidationError);
}

TEST(Mean, Examples) {
  auto g = standard_grid(2, -3, 4);
  const Cube q = Cube::root_of(g);
  EXPECT_EQ(mean(unit_atoms(2, {{3.0, 4.0}}), q, 0), 3.0);
  EXPECT_EQ(mean(unit_atoms(2, {{0.0, 0.0}, {1.0, 0.0}}), q, 0), 0.5);
  EXPECT_EQ(mean(DiscreteMeasure(2, {{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, 3.0}}), q, 0), 0.75);
  EXPECT_THROW(mean(DiscreteMeasure(2), q, 0), std::domain_error);
}

namespace {

Scenario with_line(DiscreteMeasure sigma, DiscreteMeasure omega, LineSpec line) {
  Scenario s;
  s.sigma = std::move(sigma);
  s.omega = std::move(omega);
  s.line = line;
  s.line_role = LineRole::Omega;
  return s;
}

}  // namespace

TEST(Canonicalize, AxisIsIdentity) {
  const auto s = with_line(unit_atoms(2, {{0.3, 0.7}}), unit_atoms(2, {{0.1, 0.0}, {0.9, 0.0}}),
                           LineSpec::axis(2));
  const auto c = canonicalize_line(s);
  EXPECT_EQ(c.sigma[0].location, s.sigma[0].location);
  EXPECT_EQ(c.omega[1].location, s.omega[1].location);
}

TEST(Canonicalize, SecondAxisRotates) {
  const auto s = with_line(unit_atoms(2, {{1.0, 1.0}}), unit_atoms(2, {{0.0, 3.0}}),
                           LineSpec{{0.0, 0.0}, {0.0, 1.0}});
  const auto c = canonicalize_line(s);
  EXPECT_NEAR(c.omega[0].location[0], 3.0, 1e-15);
  EXPECT_EQ(c.omega[0].location[1], 0.0);
}

TEST(Canonicalize, ParallelLineTranslates) {
  const auto s = with_line(unit_atoms(2, {{0.5, 3.0}}), unit_atoms(2, {{2.0, 1.0}}),
                           LineSpec{{1.0, 1.0}, {1.0, 0.0}});
  const auto c = canonicalize_line(s);
  EXPECT_EQ(c.omega[0].location, (Point{2.0, 0.0}));
  EXPECT_EQ(c.sigma[0].location, (Point{0.5, 2.0}));
}

TEST(Canonicalize, PreservesDistancesAndMasses) {
  Rng rng(8);
  for (int n : {2, 3, 4}) {
    Point dir(n), p(n);
    for (int i = 0; i < n; ++i) {
      dir[i] = rng.normal();
      p[i] = rng.uniform(-1.0, 1.0);
    }
    const double len = norm(dir);
    for (double& d : dir) d /= len;
    std::vector<Atom> om, sg;
    for (int k = 0; k < 10; ++k) {
      Point x(n);
      const double t = rng.uniform(-2.0, 2.0);
      for (int i = 0; i < n; ++i) x[i] = p[i] + t * dir[i];
      om.push_back({x, rng.uniform(0.1, 10.0)});
      Point y(n);
      for (int i = 0; i < n; ++i) y[i] = rng.uniform(-2.0, 2.0);
      sg.push_back({y, rng.uniform(0.1, 10.0)});
    }
    Scenario s = with_line(DiscreteMeasure(n, sg), DiscreteMeasure(n, om), LineSpec{p, dir});
    s.n = n;
    const auto c = canonicalize_line(s);
    EXPECT_TRUE(is_supported_on_line(c.omega, LineSpec::axis(n)));
    std::vector<Atom> before = s.sigma.atoms(), after = c.sigma.atoms();
    before.insert(before.end(), s.omega.atoms().begin(), s.omega.atoms().end());
    after.insert(after.end(), c.omega.atoms().begin(), c.omega.atoms().end());
    for (std::size_t i = 0; i < before.size(); ++i) {
      EXPECT_EQ(before[i].mass, after[i].mass);
      for (std::size_t j = 0; j < i; ++j)
        EXPECT_NEAR(distance(before[i].location, before[j].location),
                    distance(after[i].location, after[j].location), 1e-12);
    }
  }
}

TEST(Canonicalize, RequiresFlaggedLine) {
  Scenario s;
  EXPECT_THROW(canonicalize_line(s), ValidationError);
}
