#pragma once

// Market instances shared by several test binaries.

#include "peakload/market.hpp"
#include "peakload/robust.hpp"

#include <random>

namespace fixture {

using namespace peakload;

inline VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// conv{(0,0),(1,0),(0,1),(3/4,3/4)}
inline Polytope kite() {
  MatrixXd p(2, 2);
  p << 3, 1, 1, 3;
  return Polytope(p, vec({3, 3}));
}

inline MarketInstance fixed_market(std::vector<Producer> producers, VectorXd d, Polytope u) {
  MarketInstance inst;
  inst.producers = std::move(producers);
  inst.periods = d.size();
  inst.demand = FixedDemand{std::move(d)};
  inst.uncertainty = std::move(u);
  return inst;
}

inline MarketInstance elastic_market(std::vector<Producer> producers, VectorXd alpha, VectorXd beta, Polytope u) {
  MarketInstance inst;
  inst.producers = std::move(producers);
  inst.periods = alpha.size();
  inst.demand = AffineDemand{std::move(alpha), std::move(beta)};
  inst.uncertainty = std::move(u);
  return inst;
}

// Two producers, two periods, c_inv 1, cost 1 + u, per-period simplex, d = (1, 2).
inline MarketInstance two_period_reform() {
  return fixed_market({{1, 1, 1, {}}, {1, 1, 1, {}}}, vec({1, 2}), Polytope::simplex(2));
}

// One period, c_inv 1, cost u_i, simplex, d = 2.
inline MarketInstance single_period_vertices() {
  return fixed_market({{1, 0, 1, {}}, {1, 0, 1, {}}}, vec({2}), Polytope::simplex(2));
}

// p(s) = 5 - s, c_inv 0.2, c_var 0, a 4, kite set.
inline MarketInstance subsidy_example() {
  return elastic_market({{0.2, 0, 4, {}}, {0.2, 0, 4, {}}}, vec({5}), vec({1}), kite());
}

// Random valid uncertainty set: hull of the origin, the unit axes and a few
// random points of the unit box.
Polytope random_valid_set(std::mt19937_64& rng, Index n, int extra);

MarketInstance random_fixed_market(std::mt19937_64& rng);
MarketInstance random_elastic_market(std::mt19937_64& rng, Index max_producers = 3);

// n, k, m in [1, 6]; nonnegative data so the program is feasible and bounded.
RobustLp random_robust_lp(std::mt19937_64& rng);

// Valid set with 2 to 4 vertices (n = 2 or 3).
Polytope small_vertex_set(std::mt19937_64& rng, Index n);

}  // namespace fixture
