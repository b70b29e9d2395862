#include "twoweight/constants.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "twoweight/energy.hpp"
#include "twoweight/transform.hpp"

namespace tw {

const char* to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

CubeRef CubeRef::of(int grid, const Cube& q) {
  return {grid, q.level(), std::vector<std::int64_t>(q.coords().begin(), q.coords().end())};
}

Cube CubeRef::resolve(const std::vector<GridPtr>& grids) const {
  if (grid < 0 || grid >= static_cast<int>(grids.size()))
    throw ValidationError("cube reference names an unknown grid");
  return Cube(grids[grid], level, coords);
}

void PartitionStrategy::validate() const {
  if (uniform_depth < 0 || uniform_depth > 8) throw ValidationError("partitions: uniform_depth in [0,8]");
  if (random_samples < 0) throw ValidationError("partitions: random_samples must be >= 0");
  if (!(split_probability >= 0.0 && split_probability <= 1.0))
    throw ValidationError("partitions: split_probability in [0,1]");
}

std::string PartitionStrategy::describe() const {
  std::string s;
  auto add = [&](const std::string& part) { s += (s.empty() ? "" : "+") + part; };
  if (trivial) add("trivial");
  if (uniform_depth > 0) add("uniform" + std::to_string(uniform_depth));
  if (random_samples > 0) add("random" + std::to_string(random_samples));
  if (greedy) add("greedy");
  if (dp) add("dp");
  return s.empty() ? "none" : s;
}

const ConstantRecord& ConstantsReport::get(const std::string& name) const {
  for (const auto& r : records)
    if (r.name == name) return r;
  throw std::out_of_range("no constant named " + name);
}

std::vector<Cube> occupied_cubes(const GridPtr& grid, const std::vector<const DiscreteMeasure*>& mus) {
  const Cube root = Cube::root_of(grid);
  std::set<Cube> found;
  for (const DiscreteMeasure* mu : mus)
    for (const Atom& a : mu->atoms()) {
      if (!root.contains(a.location)) continue;
      for (int k = grid->level_min; k <= grid->level_max; ++k)
        found.insert(Cube::containing(grid, k, a.location));
    }
  return {found.begin(), found.end()};
}

namespace {

using Members = std::vector<std::size_t>;

Members members_in(const Cube& q, const DiscreteMeasure& mu) {
  Members out;
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (q.contains(mu[k].location)) out.push_back(k);
  return out;
}

double mass_of(const DiscreteMeasure& mu, const Members& m) {
  std::vector<double> t;
  t.reserve(m.size());
  for (std::size_t k : m) t.push_back(mu[k].mass);
  return pairwise_sum(t);
}

struct CubeData {
  Cube q;
  Members sigma;
  Members omega;
  double msigma = 0.0;
  double momega = 0.0;
};

std::vector<CubeData> cube_data(const GridPtr& grid, const Scenario& s) {
  std::vector<CubeData> out;
  for (const Cube& q : occupied_cubes(grid, {&s.sigma, &s.omega})) {
    CubeData d{q, members_in(q, s.sigma), members_in(q, s.omega)};
    d.msigma = mass_of(s.sigma, d.sigma);
    d.momega = mass_of(s.omega, d.omega);
    out.push_back(std::move(d));
  }
  return out;
}

/// Truncated kernel K(b_i - a_j) for omega-atom i and sigma-atom j.
class KernelMatrix {
 public:
  explicit KernelMatrix(const Scenario& s)
      : n_(s.n), m_(s.sigma.size()), data_(s.omega.size() * s.sigma.size() * s.n) {
    const KernelParams kp = s.kernel();
    const Truncation tr = s.effective_truncation();
    Point w(n_);
    for (std::size_t i = 0; i < s.omega.size(); ++i)
      for (std::size_t j = 0; j < m_; ++j) {
        for (int l = 0; l < n_; ++l) w[l] = s.omega[i].location[l] - s.sigma[j].location[l];
        truncated_kernel(w, tr, kp, std::span<double>(&data_[(i * m_ + j) * n_], n_));
      }
  }
  double operator()(std::size_t i, std::size_t j, int l) const { return data_[(i * m_ + j) * n_ + l]; }

 private:
  int n_;
  std::size_t m_;
  std::vector<double> data_;
};

std::string family_of(const Scenario& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "grids=%zu levels=%d..%d shifts=%s", s.build_grids().size(),
                s.grids.level_min, s.grids.level_max, s.grids.shifts.empty() ? "default" : "custom");
  return buf;
}

// Deterministic argmax: the first strictly larger candidate wins.
void offer(Valued& best, double value, const Witness& w) {
  if (value > best.value) {
    best.value = value;
    best.witness = w;
  }
}

Witness cube_witness(int g, const Cube& q) { return Witness{{CubeRef::of(g, q)}, -1, {}, ""}; }

// sum over a of weight_a * K(., a) evaluated as a vector, components summed pairwise.
double squared_norm(const std::vector<std::vector<double>>& comps) {
  double s = 0.0;
  for (const auto& c : comps) {
    const double v = pairwise_sum(c);
    s += v * v;
  }
  return s;
}

}  // namespace

Valued a2_classical(const Scenario& s) {
  Valued best;
  const auto grids = s.build_grids();
  const double e = 2.0 * (s.n - s.alpha);
  for (int g = 0; g < static_cast<int>(grids.size()); ++g)
    for (const CubeData& d : cube_data(grids[g], s)) {
      if (d.msigma <= 0.0 || d.momega <= 0.0) continue;
      offer(best, d.msigma * d.momega / std::pow(d.q.side(), e), cube_witness(g, d.q));
    }
  return best;
}

Valued a2_onesided(const Scenario& s, Direction dir) {
  Valued best;
  const auto grids = s.build_grids();
  const KernelParams kp = s.kernel();
  const DiscreteMeasure& first = dir == Direction::Forward ? s.sigma : s.omega;
  const double e = s.n - s.alpha;
  for (int g = 0; g < static_cast<int>(grids.size()); ++g)
    for (const CubeData& d : cube_data(grids[g], s)) {
      const double m2 = dir == Direction::Forward ? d.momega : d.msigma;
      if (m2 <= 0.0) continue;
      offer(best, poisson_reproducing(d.q, first, kp) * m2 / std::pow(d.q.side(), e),
            cube_witness(g, d.q));
    }
  return best;
}

Valued testing_constant(const Scenario& s, Direction dir) {
  Valued best;
  const auto grids = s.build_grids();
  const KernelMatrix km(s);
  for (int g = 0; g < static_cast<int>(grids.size()); ++g)
    for (const CubeData& d : cube_data(grids[g], s)) {
      const bool fwd = dir == Direction::Forward;
      const double mass = fwd ? d.msigma : d.momega;
      if (mass <= 0.0) continue;
      // Forward: T(1_Q sigma) at omega-atoms of Q; backward: the adjoint at sigma-atoms.
      const Members& src = fwd ? d.sigma : d.omega;
      const Members& dst = fwd ? d.omega : d.sigma;
      const DiscreteMeasure& src_mu = fwd ? s.sigma : s.omega;
      const DiscreteMeasure& dst_mu = fwd ? s.omega : s.sigma;
      std::vector<double> terms;
      for (std::size_t b : dst) {
        std::vector<std::vector<double>> comps(s.n);
        for (std::size_t a : src)
          for (int l = 0; l < s.n; ++l)
            comps[l].push_back((fwd ? km(b, a, l) : km(a, b, l)) * src_mu[a].mass);
        terms.push_back(dst_mu[b].mass * squared_norm(comps));
      }
      offer(best, std::sqrt(pairwise_sum(terms) / mass), cube_witness(g, d.q));
    }
  return best;
}

namespace {

// Q inside 3Q' and disjoint from Q', in integer coordinates at the finer level.
bool in_triple_outside(const Cube& q, const Cube& qp) {
  const int fine = std::max(q.level(), qp.level());
  const std::int64_t sq = std::int64_t{1} << (fine - q.level());
  const std::int64_t sp = std::int64_t{1} << (fine - qp.level());
  bool disjoint = false;
  for (int i = 0; i < q.dimension(); ++i) {
    const std::int64_t lo = q.coords()[i] * sq, hi = lo + sq;
    const std::int64_t plo = qp.coords()[i] * sp, phi = plo + sp;
    if (lo < plo - sp || hi > phi + sp) return false;
    if (hi <= plo || phi <= lo) disjoint = true;
  }
  return disjoint;
}

}  // namespace

Valued wbp_constant(const Scenario& s, double comparability) {
  const double c = comparability > 0.0 ? comparability : s.wbp_constant_c();
  Valued best;
  const auto grids = s.build_grids();
  const KernelMatrix km(s);
  for (int g = 0; g < static_cast<int>(grids.size()); ++g) {
    const auto data = cube_data(grids[g], s);
    for (const CubeData& dq : data) {
      if (dq.momega <= 0.0) continue;
      for (const CubeData& dp : data) {
        if (dp.msigma <= 0.0) continue;
        if (std::ldexp(1.0, std::abs(dq.q.level() - dp.q.level())) > c) continue;
        if (!in_triple_outside(dq.q, dp.q) && !in_triple_outside(dp.q, dq.q)) continue;
        std::vector<std::vector<double>> comps(s.n);
        for (std::size_t b : dq.omega)
          for (std::size_t a : dp.sigma)
            for (int l = 0; l < s.n; ++l)
              comps[l].push_back(s.omega[b].mass * s.sigma[a].mass * km(b, a, l));
        const double v = std::sqrt(squared_norm(comps)) / std::sqrt(dq.momega * dp.msigma);
        Witness w{{CubeRef::of(g, dq.q), CubeRef::of(g, dp.q)}, -1, {}, ""};
        offer(best, v, w);
      }
    }
  }
  return best;
}

namespace {

// Largest singular value of the stacked matrix sqrt(dst_i) K_l(.) sqrt(src_j);
// rows are (dst atom, component) pairs.
double stacked_norm(const Scenario& s, bool adjoint) {
  check_no_common_points(s.sigma, s.omega);
  const DiscreteMeasure& src = adjoint ? s.omega : s.sigma;
  const DiscreteMeasure& dst = adjoint ? s.sigma : s.omega;
  const std::size_t rows = dst.size() * s.n, cols = src.size();
  if (rows == 0 || cols == 0) return 0.0;
  const KernelMatrix km(s);
  Eigen::MatrixXd a(rows, cols);
  for (std::size_t i = 0; i < dst.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      for (int l = 0; l < s.n; ++l)
        a(i * s.n + l, j) = std::sqrt(dst[i].mass) * (adjoint ? km(j, i, l) : km(i, j, l)) *
                            std::sqrt(src[j].mass);
  const Eigen::MatrixXd gram =
      cols <= rows ? Eigen::MatrixXd(a.transpose() * a) : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

double op_norm(const Scenario& s) { return stacked_norm(s, false); }

double op_norm_adjoint(const Scenario& s) { return stacked_norm(s, true); }

namespace {

struct DeepEntry {
  Point center;
  double side = 0.0;
  Box dilate;
  double subgood = 0.0;
};

/// Shared precomputation for one direction: per grid, the cubes that can act
/// as I and as pieces I_r, and for each piece and ell the list M^ell(I_r)
/// with the subgood projection norms attached.
class EnergyEngine {
 public:
  EnergyEngine(const Scenario& s, Direction dir, unsigned workers)
      : s_(s),
        first_(dir == Direction::Forward ? s.sigma : s.omega),
        second_(dir == Direction::Forward ? s.omega : s.sigma),
        kp_(s.kernel()),
        gp_(s.goodness),
        grids_(s.build_grids()),
        support_(second_.locations()) {
    all_second_.resize(second_.size());
    for (std::size_t k = 0; k < second_.size(); ++k) all_second_[k] = k;
    for (int g = 0; g < static_cast<int>(grids_.size()); ++g) build_grid(g, workers);
  }

  std::vector<Valued> run(bool plug, const PartitionStrategy& ps, unsigned workers) const {
    struct Task {
      int grid;
      std::size_t outer;
    };
    std::vector<Task> tasks;
    for (int g = 0; g < static_cast<int>(grids_.size()); ++g)
      for (std::size_t i = 0; i < per_grid_[g].outers.size(); ++i) tasks.push_back({g, i});
    const std::size_t nstrat = 5;
    std::vector<std::vector<Valued>> results(tasks.size(), std::vector<Valued>(nstrat));
    parallel_for(tasks.size(), workers, [&](std::size_t t) {
      results[t] = evaluate(tasks[t].grid, tasks[t].outer, plug, ps);
    });
    std::vector<Valued> best(nstrat);
    for (std::size_t k = 0; k < nstrat; ++k) best[k].witness.strategy = kNames[k];
    for (const auto& r : results)
      for (std::size_t k = 0; k < nstrat; ++k) offer(best[k], r[k].value, r[k].witness);
    std::vector<Valued> out;
    const bool enabled[5] = {ps.trivial, ps.uniform_depth > 0, ps.random_samples > 0, ps.greedy,
                             ps.dp};
    for (std::size_t k = 0; k < nstrat; ++k)
      if (enabled[k]) out.push_back(best[k]);
    return out;
  }

  std::vector<Valued> beta(int grid) const {
    std::vector<Valued> out;
    const Grid& gd = per_grid_[grid];
    for (std::size_t pi = 0; pi < gd.pieces.size(); ++pi)
      for (int ell = 0; ell <= gp_.ell_max; ++ell) {
        const auto& fam = gd.deep_cubes[pi][ell];
        if (fam.empty()) continue;
        const int b = overlap_constant(gd.pieces[pi], fam, gp_.gamma);
        Witness w = cube_witness(grid, gd.pieces[pi]);
        w.ell = ell;
        out.push_back({static_cast<double>(b), w});
      }
    return out;
  }

  int grid_count() const { return static_cast<int>(grids_.size()); }

 private:
  static constexpr const char* kNames[5] = {"trivial", "uniform", "random", "greedy", "dp"};

  struct Outer {
    Cube cube;
    Members first;
    double mass;
  };

  struct Grid {
    std::vector<Outer> outers;
    std::vector<Cube> pieces;
    std::map<Cube, std::size_t> index;
    std::vector<std::vector<std::size_t>> children;
    // [piece][ell]
    std::vector<std::vector<std::vector<DeepEntry>>> deep;
    std::vector<std::vector<std::vector<Cube>>> deep_cubes;
  };

  void build_grid(int g, unsigned workers) {
    Grid gd;
    const GridPtr& grid = grids_[g];
    for (const Cube& q : occupied_cubes(grid, {&first_})) {
      Outer o{q, members_in(q, first_), 0.0};
      o.mass = mass_of(first_, o.first);
      if (o.mass > 0.0) gd.outers.push_back(std::move(o));
    }
    gd.pieces = occupied_cubes(grid, {&second_});
    for (std::size_t i = 0; i < gd.pieces.size(); ++i) gd.index.emplace(gd.pieces[i], i);
    gd.children.resize(gd.pieces.size());
    for (std::size_t i = 0; i < gd.pieces.size(); ++i) {
      if (gd.pieces[i].level() >= grid->level_max) continue;
      for (const Cube& c : gd.pieces[i].children())
        if (auto it = gd.index.find(c); it != gd.index.end()) gd.children[i].push_back(it->second);
    }
    const int nell = gp_.ell_max + 1;
    gd.deep.assign(gd.pieces.size(), std::vector<std::vector<DeepEntry>>(nell));
    gd.deep_cubes.assign(gd.pieces.size(), std::vector<std::vector<Cube>>(nell));
    parallel_for(gd.pieces.size(), workers, [&](std::size_t i) {
      const Cube& q = gd.pieces[i];
      for (int ell = 0; ell < nell; ++ell) {
        if (q.level() - ell < grid->level_min) break;
        auto fam = refined_deep_subcubes(q, ell, gp_, support_);
        for (const Cube& j : fam) {
          DeepEntry e{j.center(), j.side(), j.dilate(gp_.gamma),
                      projection_norm_subgood(j, second_, gp_, all_second_)};
          if (e.subgood > 0.0) gd.deep[i][ell].push_back(std::move(e));
        }
        gd.deep_cubes[i][ell] = std::move(fam);
      }
    });
    per_grid_.push_back(std::move(gd));
  }

  // sum_{J in M^ell(Q)} (P(J, 1_{I \ gamma J} first) / l(J))^2 subgood(J)
  double piece_value(const Grid& gd, std::size_t pi, int ell, const Outer& o, bool plug) const {
    std::vector<double> terms;
    for (const DeepEntry& e : gd.deep[pi][ell]) {
      std::vector<double> p;
      for (std::size_t a : o.first) {
        const Atom& at = first_[a];
        if (!plug && e.dilate.contains(at.location)) continue;
        p.push_back(at.mass * poisson_standard_term(e.side, distance(at.location, e.center), kp_));
      }
      const double ratio = pairwise_sum(p) / e.side;
      terms.push_back(ratio * ratio * e.subgood);
    }
    return pairwise_sum(terms);
  }

 public:
  std::vector<Witness> partitions_at(const CubeRef& outer, bool plug, const PartitionStrategy& ps) const {
    std::vector<Witness> all;
    const Cube target = outer.resolve(grids_);
    const auto& outers = per_grid_[outer.grid].outers;
    for (std::size_t i = 0; i < outers.size(); ++i)
      if (outers[i].cube == target) evaluate(outer.grid, i, plug, ps, &all);
    return all;
  }

 private:
  std::vector<Valued> evaluate(int g, std::size_t oi, bool plug, const PartitionStrategy& ps,
                               std::vector<Witness>* sink = nullptr) const {
    const Grid& gd = per_grid_[g];
    const Outer& o = gd.outers[oi];
    const int level_max = grids_[g]->level_max;
    std::vector<Valued> best(5);
    // Pieces inside I in (level, coords) order; their children stay inside.
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < gd.pieces.size(); ++i)
      if (o.cube.contains(gd.pieces[i])) inside.push_back(i);
    if (inside.empty()) return best;
    const std::size_t top = inside.front();  // == I itself, since I holds second-atoms
    std::vector<double> val(gd.pieces.size(), 0.0);

    auto finish = [&](std::size_t k, int ell, double sum, const std::vector<std::size_t>& parts) {
      Witness w = cube_witness(g, o.cube);
      w.ell = ell;
      w.strategy = kNames[k];
      for (std::size_t p : parts)
        w.partition.push_back(CubeRef::of(g, gd.pieces[p]));
      if (sink) sink->push_back(w);
      offer(best[k], std::sqrt(std::max(0.0, sum) / o.mass), w);
    };
    auto total = [&](const std::vector<std::size_t>& parts) {
      std::vector<double> t;
      for (std::size_t p : parts) t.push_back(val[p]);
      return pairwise_sum(t);
    };

    for (int ell = 0; ell <= gp_.ell_max; ++ell) {
      for (std::size_t i : inside) val[i] = piece_value(gd, i, ell, o, plug);

      if (ps.trivial) finish(0, ell, val[top], {top});

      for (int depth = 1; depth <= ps.uniform_depth; ++depth) {
        const int lev = o.cube.level() + depth;
        if (lev > level_max) break;
        std::vector<std::size_t> parts;
        for (std::size_t i : inside)
          if (gd.pieces[i].level() == lev) parts.push_back(i);
        finish(1, ell, total(parts), parts);
      }

      for (int k = 0; k < ps.random_samples; ++k) {
        std::uint64_t seed = mix_seed(ps.seed, static_cast<std::uint64_t>(g));
        seed = mix_seed(seed, oi);
        seed = mix_seed(seed, static_cast<std::uint64_t>(ell) * 1000003ULL + k);
        Rng rng(seed);
        std::vector<std::size_t> parts;
        std::vector<std::size_t> stack{top};
        while (!stack.empty()) {
          const std::size_t q = stack.back();
          stack.pop_back();
          const bool split = gd.pieces[q].level() < level_max && !gd.children[q].empty() &&
                             rng.uniform() < ps.split_probability;
          if (!split) {
            parts.push_back(q);
            continue;
          }
          for (auto it = gd.children[q].rbegin(); it != gd.children[q].rend(); ++it)
            stack.push_back(*it);
        }
        std::sort(parts.begin(), parts.end());
        finish(2, ell, total(parts), parts);
      }

      if (ps.greedy) {
        std::vector<std::size_t> parts{top};
        std::vector<bool> frozen(gd.pieces.size(), false);
        for (;;) {
          std::size_t pick = parts.size();
          for (std::size_t k = 0; k < parts.size(); ++k) {
            if (frozen[parts[k]]) continue;
            if (pick == parts.size() || val[parts[k]] > val[parts[pick]]) pick = k;
          }
          if (pick == parts.size()) break;
          const std::size_t q = parts[pick];
          const auto& kids = gd.children[q];
          if (kids.empty() || total(kids) <= val[q]) {
            frozen[q] = true;
            continue;
          }
          parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(pick));
          parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(pick), kids.begin(), kids.end());
        }
        std::sort(parts.begin(), parts.end());
        finish(3, ell, total(parts), parts);
      }

      if (ps.dp) {
        std::vector<double> opt(gd.pieces.size(), 0.0);
        std::vector<bool> split(gd.pieces.size(), false);
        for (auto it = inside.rbegin(); it != inside.rend(); ++it) {
          const std::size_t q = *it;
          opt[q] = val[q];
          if (gd.children[q].empty()) continue;
          std::vector<double> t;
          for (std::size_t c : gd.children[q]) t.push_back(opt[c]);
          const double below = pairwise_sum(t);
          if (below > opt[q]) {
            opt[q] = below;
            split[q] = true;
          }
        }
        std::vector<std::size_t> parts;
        std::vector<std::size_t> stack{top};
        while (!stack.empty()) {
          const std::size_t q = stack.back();
          stack.pop_back();
          if (!split[q]) {
            parts.push_back(q);
            continue;
          }
          for (std::size_t c : gd.children[q]) stack.push_back(c);
        }
        std::sort(parts.begin(), parts.end());
        finish(4, ell, total(parts), parts);
      }
    }
    return best;
  }

  const Scenario& s_;
  const DiscreteMeasure& first_;
  const DiscreteMeasure& second_;
  KernelParams kp_;
  GoodnessParams gp_;
  std::vector<GridPtr> grids_;
  std::vector<Point> support_;
  std::vector<std::size_t> all_second_;
  std::vector<Grid> per_grid_;
};

Valued best_of(const std::vector<Valued>& v) {
  Valued best;
  for (const Valued& x : v) offer(best, x.value, x.witness);
  return best;
}

}  // namespace

std::vector<Valued> energy_by_strategy(const Scenario& s, Direction d, bool plug,
                                       const PartitionStrategy& ps, unsigned workers) {
  ps.validate();
  return EnergyEngine(s, d, workers).run(plug, ps, workers);
}

Valued energy_constant(const Scenario& s, Direction d, const PartitionStrategy& ps,
                       unsigned workers) {
  return best_of(energy_by_strategy(s, d, false, ps, workers));
}

Valued energy_plug_constant(const Scenario& s, Direction d, const PartitionStrategy& ps,
                            unsigned workers) {
  return best_of(energy_by_strategy(s, d, true, ps, workers));
}

double energy_functional(const Scenario& s, Direction d, bool plug, const CubeRef& outer, int ell,
                         const std::vector<CubeRef>& pieces) {
  const DiscreteMeasure& first = d == Direction::Forward ? s.sigma : s.omega;
  const DiscreteMeasure& second = d == Direction::Forward ? s.omega : s.sigma;
  const auto grids = s.build_grids();
  const KernelParams kp = s.kernel();
  const Cube i = outer.resolve(grids);
  const double mass = total_mass(first, i);
  if (mass <= 0.0) return 0.0;
  const auto support = second.locations();
  std::vector<double> terms;
  for (const CubeRef& ref : pieces) {
    const Cube piece = ref.resolve(grids);
    if (piece.level() - ell < piece.grid().level_min) continue;
    for (const Cube& j : refined_deep_subcubes(piece, ell, s.goodness, support)) {
      const double sg = projection_norm_subgood(j, second, s.goodness);
      const Box hole = j.dilate(s.goodness.gamma);
      const Point c = j.center();
      std::vector<double> p;
      for (const Atom& a : first.atoms()) {
        if (!i.contains(a.location)) continue;
        if (!plug && hole.contains(a.location)) continue;
        p.push_back(a.mass * poisson_standard_term(j.side(), distance(a.location, c), kp));
      }
      const double ratio = pairwise_sum(p) / j.side();
      terms.push_back(ratio * ratio * sg);
    }
  }
  return pairwise_sum(terms) / mass;
}

std::vector<Cube> energy_decomposition(const Scenario& s, Direction d,
                                       const std::vector<GridPtr>& grids, const Witness& w) {
  const DiscreteMeasure& second = d == Direction::Forward ? s.omega : s.sigma;
  const auto support = second.locations();
  std::vector<Cube> out;
  for (const CubeRef& ref : w.partition) {
    const Cube piece = ref.resolve(grids);
    if (piece.level() - w.ell < piece.grid().level_min) continue;
    for (Cube& j : refined_deep_subcubes(piece, w.ell, s.goodness, support)) out.push_back(std::move(j));
  }
  return out;
}

std::vector<Witness> energy_partitions(const Scenario& s, Direction d, bool plug,
                                      const CubeRef& outer, const PartitionStrategy& ps) {
  ps.validate();
  return EnergyEngine(s, d, 1).partitions_at(outer, plug, ps);
}

Valued overlap_beta(const Scenario& s) {
  Valued best;
  for (Direction d : {Direction::Forward, Direction::Backward}) {
    const EnergyEngine engine(s, d, 1);
    for (int g = 0; g < engine.grid_count(); ++g)
      for (const Valued& v : engine.beta(g)) offer(best, v.value, v.witness);
  }
  return best;
}

ConstantsReport compute_constants(const Scenario& s, const ConstantsOptions& opt) {
  opt.partitions.validate();
  ConstantsReport rep;
  const std::string family = family_of(s);
  const std::string strategy = opt.partitions.describe();
  auto timed = [&](const std::string& name, const std::string& strat, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Valued v = fn();
    const auto t1 = std::chrono::steady_clock::now();
    ConstantRecord r{name, v.value, std::move(v.witness), family, strat, 0.0};
    if (opt.timing) r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rep.records.push_back(std::move(r));
  };
  timed("a2_classical", "exhaustive", [&] { return a2_classical(s); });
  timed("a2_forward", "exhaustive", [&] { return a2_onesided(s, Direction::Forward); });
  timed("a2_backward", "exhaustive", [&] { return a2_onesided(s, Direction::Backward); });
  timed("testing_forward", "exhaustive", [&] { return testing_constant(s, Direction::Forward); });
  timed("testing_backward", "exhaustive", [&] { return testing_constant(s, Direction::Backward); });
  timed("wbp", "exhaustive", [&] { return wbp_constant(s); });
  const EnergyEngine fwd(s, Direction::Forward, opt.workers);
  const EnergyEngine bwd(s, Direction::Backward, opt.workers);
  timed("energy_forward", strategy, [&] { return best_of(fwd.run(false, opt.partitions, opt.workers)); });
  timed("energy_backward", strategy, [&] { return best_of(bwd.run(false, opt.partitions, opt.workers)); });
  timed("energy_plug_forward", strategy,
        [&] { return best_of(fwd.run(true, opt.partitions, opt.workers)); });
  timed("energy_plug_backward", strategy,
        [&] { return best_of(bwd.run(true, opt.partitions, opt.workers)); });
  timed("op_norm", "eigensolve", [&] { return Valued{op_norm(s), {}}; });
  timed("op_norm_adjoint", "eigensolve", [&] { return Valued{op_norm_adjoint(s), {}}; });
  timed("overlap_beta", "exhaustive", [&] {
    Valued best;
    for (const EnergyEngine* e : {&fwd, &bwd})
      for (int g = 0; g < e->grid_count(); ++g)
        for (const Valued& v : e->beta(g)) offer(best, v.value, v.witness);
    return best;
  });
  return rep;
}

}  // namespace tw
