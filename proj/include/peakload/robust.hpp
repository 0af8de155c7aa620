#pragma once

// Robust LPs with objective uncertainty c + diag(lambda) u, u in U, and the
// strict / adjustable robust market and central-planner solves built on them.

#include "peakload/geometry.hpp"
#include "peakload/market.hpp"
#include "peakload/numsolve.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace peakload {

// min c^T x + d^T y + max_{u in U} (diag(lambda) u)^T x  s.t. A x + B y >= b, x, y >= 0.
struct RobustLp {
  MatrixXd A, B;
  VectorXd b, c, d, lambda;
  Polytope U;

  void check() const;
};

struct RobustReport {
  double val_R = 0.0;
  double val_Btilde = 0.0;
  double val_B = 0.0;
  VectorXd x_R, y_R;  // robust optimum
  VectorXd x_B, y_B;  // box optimum
  VectorXd worst_u;
  bool worst_u_from_duals = false;
  double tau = 0.0;
  bool chain_ok = false;  // val_R <= val_B <= val_Btilde
  bool bound_ok = false;  // val_B <= val_R / tau
};

// Throws Error(numeric_breakdown) naming the status when a program is not optimal.
RobustReport solve_robust_lp(const RobustLp& p, const Tolerances& tol = {});

enum class WorstCaseSource { duals, inner_program };
const char* to_string(WorstCaseSource s);

struct RobustMarketResult {
  EquilibriumSolution solution;
  double value = 0.0;  // E_R / E'_R for markets, C_R / C'_R for planners
  MatrixXd worst_u;    // N x T
  WorstCaseSource worst_u_source = WorstCaseSource::inner_program;
  double saddle_gap = 0.0;  // |objective at worst_u - value|
};

// Strict robust market: producers plan with worst-case costs, E evaluated at
// the adversarial scenario for the resulting (x, y).
RobustMarketResult solve_robust_market_fixed(const MarketInstance& inst, const SolveOptions& opt = {});
RobustMarketResult solve_robust_market_elastic(const MarketInstance& inst, const SolveOptions& opt = {});
RobustMarketResult solve_robust_market(const MarketInstance& inst, const SolveOptions& opt = {});

// Strict robust central planner via dualization of the adversary.
RobustMarketResult solve_robust_cp_fixed(const MarketInstance& inst, const SolveOptions& opt = {});
RobustMarketResult solve_robust_cp_elastic(const MarketInstance& inst, const SolveOptions& opt = {});
RobustMarketResult solve_robust_cp(const MarketInstance& inst, const SolveOptions& opt = {});

struct MarketRobustReport {
  RobustMarketResult market;
  RobustMarketResult planner;
  double E = 0.0;
  double C = 0.0;
  double tau = 0.0;
  bool order_ok = false;  // C <= E (fixed) or E' <= C' (elastic)
};

MarketRobustReport analyze_robust_market(const MarketInstance& inst, const SolveOptions& opt = {});

// max over the lifted set of sum a_{i,t} u_{i,t} x_{i,t}
struct InnerWorstCase {
  double value = 0.0;
  MatrixXd u;
};
InnerWorstCase worst_case_cost_term(const MarketInstance& inst, const MatrixXd& x);

// Vertices of the lifted set, built as the Cartesian product of the
// per-period vertices. Each entry is N x T.
std::vector<MatrixXd> lifted_vertices(const MarketInstance& inst);

// Best response of a planner that chooses x after u is revealed, with y fixed.
// value includes the capacity cost (or is welfare net of it).
struct InnerSolve {
  MatrixXd production;
  VectorXd prices;
  double value = 0.0;
};
InnerSolve solve_inner(const MarketInstance& inst, const VectorXd& y, const MatrixXd& u, const Tolerances& tol = {});

struct ScenarioValue {
  MatrixXd u;
  double value = 0.0;
  bool vertex = false;
};

struct AdjustableCertificate {
  double C = 0.0;
  VectorXd y_star;
  MatrixXd worst_u;
  std::vector<ScenarioValue> scenarios;
  double max_domination_violation = 0.0;  // how far any scenario beats C in the adversary's favor
  double worst_u_gap = 0.0;               // |inner value at worst_u - C|
  std::uint64_t seed = 0;
  bool passed = false;
  std::string failure;

  // Throws Error(saddle_violated) when the certificate failed.
  void require() const;
};

inline constexpr int kDefaultAdversarySamples = 64;
inline constexpr std::uint64_t kDefaultSeed = 20240611;

AdjustableCertificate verify_adjustable_equivalence(const MarketInstance& inst, const RobustMarketResult& planner,
                                                    int samples = kDefaultAdversarySamples,
                                                    std::uint64_t seed = kDefaultSeed,
                                                    const Tolerances& tol = {});

// Adjustable robust planner for fixed demand written out over the vertex
// scenarios: one production plan per scenario, a shared epigraph variable.
struct ScenarioPlannerResult {
  double value = 0.0;
  VectorXd capacities;
  std::vector<MatrixXd> scenarios;        // u per scenario, N x T
  std::vector<MatrixXd> production;       // x per scenario
  MatrixXd clearing_duals;                // scenario x period
  LpSpec program;
  std::vector<std::vector<Index>> clearing_rows;  // [scenario][period] row index in program
};
ScenarioPlannerResult solve_adjustable_cp_by_vertices(const MarketInstance& inst, const SolveOptions& opt = {});

}  // namespace peakload
