#pragma once

// Investment subsidies that turn the adjustable robust planner's capacities
// into an equilibrium with scenario-dependent prices (elastic demand only).

#include "peakload/market.hpp"
#include "peakload/robust.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace peakload {

// KKT system of the welfare problem with capacities pinned to y*:
//   max sum_t S_t(xbar_t) - sum c_{i,t}(u) x_{i,t} - c_inv^T y
//   s.t. x_{i,t} <= y_i  (mu),  x >= 0  (phi),  y = y*  (chi).
enum class KktCondition {
  stationarity_x,
  stationarity_y,
  capacity_feasibility,
  nonnegativity,
  pinned_capacity,
  multiplier_sign,
  capacity_complementarity,
  nonnegativity_complementarity,
};
constexpr int kKktConditions = 8;
const char* to_string(KktCondition c);

struct FixedCapacityWelfareResult {
  MatrixXd u;
  MatrixXd production;
  VectorXd prices;
  double objective = 0.0;
  MatrixXd mu;
  MatrixXd phi;
  VectorXd chi;
  std::array<double, kKktConditions> kkt_residuals{};

  double max_kkt_residual() const;
};

FixedCapacityWelfareResult solve_fixed_capacity_welfare(const MarketInstance& inst, const VectorXd& y_star,
                                                        const MatrixXd& u, const SolveOptions& opt = {});

struct SubsidyAuditFlag {
  Index producer = 0;
  MatrixXd u;
  double value = 0.0;   // inner expression at u
  double excess = 0.0;  // over the vertex maximum
};

struct EquilibriumViolation {
  Index producer = 0;
  Index scenario = -1;           // index into scenario_results, -1 if not scenario-specific
  double deviation = 0.0;        // capacity tried; equals y*_i for non-deviation checks
  std::string check;
  double amount = 0.0;
};

struct EquilibriumVerification {
  VectorXd worst_case_profits;
  VectorXd max_deviation_gain;
  bool best_response_ok = false;
  bool zero_profit_ok = false;
  bool deviation_ok = false;
  bool is_equilibrium = false;
  std::vector<EquilibriumViolation> violations;

  // Throws Error(not_equilibrium) naming the first violation.
  void require() const;
};

constexpr int kDefaultAuditSamples = 256;
constexpr int kDefaultDeviationGrid = 101;

struct SubsidyBundle {
  VectorXd eta;
  VectorXd y_star;
  double planner_value = 0.0;
  std::vector<FixedCapacityWelfareResult> scenario_results;  // one per lifted vertex
  MatrixXd lemma_values;                                      // N x vertices
  std::vector<SubsidyAuditFlag> audit_flags;
  int audit_samples = 0;
  std::uint64_t seed = 0;
  EquilibriumVerification verification;

  double transfer() const { return eta.dot(y_star); }
};

// Throws Error(no_capacity) when the planner builds nothing.
SubsidyBundle compute_subsidies(const MarketInstance& inst, int audit_samples = kDefaultAuditSamples,
                                std::uint64_t seed = kDefaultSeed, const SolveOptions& opt = {});

EquilibriumVerification verify_subsidized_equilibrium(const MarketInstance& inst, const SubsidyBundle& bundle,
                                                      int grid = kDefaultDeviationGrid);

// Sum over periods with positive production of (cost - price): the per-unit
// loss a producer has to be compensated for in scenario u.
double lemma_value(const MarketInstance& inst, const FixedCapacityWelfareResult& r, Index producer);

struct PriceTable {
  std::vector<MatrixXd> scenarios;
  std::vector<VectorXd> prices;
};

PriceTable build_price_functions(const SubsidyBundle& bundle);
// Price at an arbitrary scenario, re-solving the pinned-capacity problem.
VectorXd evaluate_price_function(const MarketInstance& inst, const SubsidyBundle& bundle, const MatrixXd& u,
                                 const SolveOptions& opt = {});

}  // namespace peakload
