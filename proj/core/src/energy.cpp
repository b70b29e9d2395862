#include "twoweight/energy.hpp"

#include <algorithm>

namespace tw {

namespace {

using Members = std::vector<std::size_t>;

Members members_in(const Cube& q, const DiscreteMeasure& mu, std::span<const std::size_t> from) {
  Members out;
  for (std::size_t k : from)
    if (q.contains(mu[k].location)) out.push_back(k);
  return out;
}

Members all_in(const Cube& q, const DiscreteMeasure& mu) {
  Members out;
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (q.contains(mu[k].location)) out.push_back(k);
  return out;
}

struct Moments {
  double mass = 0.0;
  Point mean;
};

Moments moments(const DiscreteMeasure& mu, std::span<const std::size_t> members) {
  const int n = mu.dimension();
  Moments m{0.0, Point(n, 0.0)};
  std::vector<double> terms(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) terms[i] = mu[members[i]].mass;
  m.mass = pairwise_sum(terms);
  if (m.mass <= 0.0) return m;
  for (int c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < members.size(); ++i)
      terms[i] = mu[members[i]].mass * mu[members[i]].location[c];
    m.mean[c] = pairwise_sum(terms) / m.mass;
  }
  return m;
}

std::vector<Members> split(const Cube& q, const DiscreteMeasure& mu, const Members& members) {
  const auto kids = q.children();
  std::vector<Members> parts(kids.size());
  for (std::size_t k : members)
    for (std::size_t c = 0; c < kids.size(); ++c)
      if (kids[c].contains(mu[k].location)) {
        parts[c].push_back(k);
        break;
      }
  return parts;
}

double haar_diff(const Cube& q, const DiscreteMeasure& mu, const Members& members) {
  if (members.size() <= 1) return 0.0;
  const Moments parent = moments(mu, members);
  const auto parts = split(q, mu, members);
  std::vector<double> terms;
  for (const Members& part : parts) {
    if (part.empty()) continue;
    const Moments child = moments(mu, part);
    double d2 = 0.0;
    for (int c = 0; c < mu.dimension(); ++c) {
      const double d = child.mean[c] - parent.mean[c];
      d2 += d * d;
    }
    terms.push_back(child.mass * d2);
  }
  return pairwise_sum(terms);
}

void subgood_rec(const Cube& q, const DiscreteMeasure& mu, const GoodnessParams& p,
                 const Members& members, std::vector<double>& out) {
  if (members.size() <= 1) return;
  if (is_good(q, p)) {
    out.push_back(variance_of(mu, members));
    return;
  }
  if (q.level() >= kHaarDepthCap) return;
  const auto kids = q.children();
  const auto parts = split(q, mu, members);
  for (std::size_t c = 0; c < kids.size(); ++c) subgood_rec(kids[c], mu, p, parts[c], out);
}

void haar_rec(const Cube& q, const DiscreteMeasure& mu, const GoodnessParams* p,
              const Members& members, std::vector<double>& out) {
  if (members.size() <= 1) return;
  if (p == nullptr || is_good(q, *p)) out.push_back(haar_diff(q, mu, members));
  if (q.level() >= kHaarDepthCap) return;
  const auto kids = q.children();
  const auto parts = split(q, mu, members);
  for (std::size_t c = 0; c < kids.size(); ++c) haar_rec(kids[c], mu, p, parts[c], out);
}

}  // namespace

double variance_of(const DiscreteMeasure& mu, std::span<const std::size_t> members) {
  if (members.size() <= 1) return 0.0;
  const Moments m = moments(mu, members);
  std::vector<double> terms(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Atom& a = mu[members[i]];
    double d2 = 0.0;
    for (int c = 0; c < mu.dimension(); ++c) {
      const double d = a.location[c] - m.mean[c];
      d2 += d * d;
    }
    terms[i] = a.mass * d2;
  }
  return pairwise_sum(terms);
}

double haar_difference_norm_sq(const Cube& j, const DiscreteMeasure& mu) {
  return haar_diff(j, mu, all_in(j, mu));
}

double projection_norm_full(const Cube& k, const DiscreteMeasure& mu) {
  return variance_of(mu, all_in(k, mu));
}

double projection_norm_subgood(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p,
                               std::span<const std::size_t> members) {
  std::vector<double> terms;
  subgood_rec(k, mu, p, members_in(k, mu, members), terms);
  return pairwise_sum(terms);
}

double projection_norm_subgood(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p) {
  std::vector<double> terms;
  subgood_rec(k, mu, p, all_in(k, mu), terms);
  return pairwise_sum(terms);
}

double projection_norm_good(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p) {
  std::vector<double> terms;
  haar_rec(k, mu, &p, all_in(k, mu), terms);
  return pairwise_sum(terms);
}

double haar_difference_total(const Cube& k, const DiscreteMeasure& mu) {
  std::vector<double> terms;
  haar_rec(k, mu, nullptr, all_in(k, mu), terms);
  return pairwise_sum(terms);
}

ProjectionNorms projection_norms(const Cube& k, const DiscreteMeasure& mu, const GoodnessParams& p) {
  return {projection_norm_full(k, mu), projection_norm_good(k, mu, p),
          projection_norm_subgood(k, mu, p)};
}

}  // namespace tw
