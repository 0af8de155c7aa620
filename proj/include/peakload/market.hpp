#pragma once

// Peak-load market data and the deterministic planner solves. Production
// x(i,t) and capacity y_i; uncertain variable cost c_var_i + a_{i,t} u_{i,t}.

#include "peakload/geometry.hpp"
#include "peakload/numsolve.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace peakload {

struct Producer {
  double c_inv = 0.0;
  double c_var = 0.0;
  double a = 0.0;
  std::optional<VectorXd> a_per_period;  // overrides a when present

  double a_at(Index t) const { return a_per_period ? (*a_per_period)(t) : a; }
};

struct FixedDemand {
  VectorXd d;
};

// p_t(s) = alpha_t - beta_t s
struct AffineDemand {
  VectorXd alpha;
  VectorXd beta;

  double price(Index t, double s) const { return alpha(t) - beta(t) * s; }
  double surplus(Index t, double s) const { return alpha(t) * s - 0.5 * beta(t) * s * s; }
};

using DemandSide = std::variant<FixedDemand, AffineDemand>;

struct MarketInstance {
  std::vector<Producer> producers;
  DemandSide demand;
  Index periods = 1;
  Polytope uncertainty;  // per-period set over the N producers

  Index num_producers() const { return static_cast<Index>(producers.size()); }
  bool fixed_demand() const { return std::holds_alternative<FixedDemand>(demand); }
  const FixedDemand& fixed() const;    // throws wrong_demand_mode
  const AffineDemand& elastic() const; // throws wrong_demand_mode

  Polytope lifted_uncertainty() const { return lift_product(uncertainty, periods); }
  MatrixXd scaling() const;  // a_{i,t}, N x T
  VectorXd c_var() const;
  VectorXd c_inv() const;

  // Structural checks; throws Error(invalid_input) naming the offending field.
  void check() const;
};

// Lifted coordinates (i, t) map to index t * N + i.
VectorXd flatten_scenario(const MatrixXd& u);
MatrixXd unflatten_scenario(const VectorXd& u, Index producers, Index periods);

struct EquilibriumSolution {
  VectorXd prices;          // per period
  VectorXd capacities;      // y, per producer
  MatrixXd production;      // x, N x T
  MatrixXd capacity_rents;  // multipliers of x <= y, N x T
  double objective = 0.0;   // total cost (fixed) or welfare (elastic)
  Certificate certificate;

  VectorXd total_production() const { return production.colwise().sum().transpose(); }
};

struct SolveOptions {
  Tolerances tol;
  bool least_norm = true;  // report the least-norm point of the optimal face
};

// Planner solve with a given per-unit variable cost matrix (N x T).
EquilibriumSolution solve_planner(const MarketInstance& inst, const MatrixXd& var_cost,
                                  const SolveOptions& opt = {});

EquilibriumSolution solve_nominal_fixed(const MarketInstance& inst, const SolveOptions& opt = {});
EquilibriumSolution solve_nominal_elastic(const MarketInstance& inst, const SolveOptions& opt = {});
EquilibriumSolution solve_nominal(const MarketInstance& inst, const SolveOptions& opt = {});

// Costs c_var_i + a_{i,t} E[u_{i,t}]. Throws Error(bad_mean) outside [0,1].
EquilibriumSolution solve_expected(const MarketInstance& inst, const MatrixXd& mean_u,
                                   const SolveOptions& opt = {});

// c_var_i + a_{i,t} u_{i,t}
MatrixXd perceived_costs(const MarketInstance& inst, const MatrixXd& u);

// Worst-case cost a strict robust producer plans with: c_var_i + a_{i,t}
// times the largest value of u_{i,t} over the set (1 on valid sets).
MatrixXd strict_robust_costs(const MarketInstance& inst);

double total_cost(const MarketInstance& inst, const MatrixXd& x, const VectorXd& y, const MatrixXd& var_cost);
double welfare(const MarketInstance& inst, const MatrixXd& x, const VectorXd& y, const MatrixXd& var_cost);
// total_cost for fixed demand, welfare for elastic
double evaluate_objective(const MarketInstance& inst, const MatrixXd& x, const VectorXd& y, const MatrixXd& var_cost);

}  // namespace peakload
