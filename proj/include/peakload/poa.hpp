#pragma once

// Price-of-anarchy reports and the instance families that attain the bounds.
// Fixed demand reports E/C (cost of the equilibrium over planner cost);
// elastic demand reports C'/E' (planner welfare over equilibrium welfare).

#include "peakload/market.hpp"
#include "peakload/robust.hpp"

#include <optional>

namespace peakload {

struct PoAReport {
  double E = 0.0;
  double C = 0.0;
  double ratio = 0.0;  // +inf when the denominator is zero and the numerator is not
  double tau = 1.0;
  std::optional<double> bound;  // fixed demand only
  std::optional<double> rho;    // set when every producer has a_i <= rho * c_var_i
  std::optional<bool> within_bound;
  bool zero_cost = false;  // C_R = 0: ratio undefined
  bool fixed_demand = true;
  MarketRobustReport detail;
};

PoAReport poa_fixed(const MarketInstance& inst, const SolveOptions& opt = {});
PoAReport poa_elastic(const MarketInstance& inst, const SolveOptions& opt = {});
PoAReport poa(const MarketInstance& inst, const SolveOptions& opt = {});

// Smallest rho with a_{i,t} <= rho * c_var_i for every producer and period;
// empty when some producer with a > 0 has zero variable cost.
std::optional<double> restricted_rho(const MarketInstance& inst);

// T = 1, d = 1, c_inv = 0, c_var = 0, a_1 = 1 - delta, a_i = 1.
MarketInstance gen_tight_instance_fixed(const Polytope& U, double delta);
// T = 1, d = 1, c_inv = 0, c_var = 1, a_1 = rho (1 - delta), a_i = rho.
MarketInstance gen_tight_instance_restricted(const Polytope& U, double rho, double delta);

constexpr double kDefaultFamilyEpsilon = 1e-6;

struct ElasticFamily {
  MarketInstance instance;
  double E_closed = 0.0;
  double C_closed = 0.0;
};

// Two producers with costs u_1 and u_2 + epsilon over the 2-simplex, p(s) = alpha - s.
ElasticFamily gen_elastic_family(double alpha, double epsilon = kDefaultFamilyEpsilon);

// Lower bound on the ratio for the restricted family: (1 + rho (1 - delta)) / (1 + rho tau).
double restricted_closed_form(double rho, double delta, double tau);

}  // namespace peakload
