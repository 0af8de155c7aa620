#include "peakload/errors.hpp"
#include "peakload/robust.hpp"

#include <cmath>
#include <string>

namespace peakload {
namespace {

void require_optimal(const SolveOutcome& out, const char* what) {
  if (!out.optimal()) {
    throw StatusError(out.status, what);
  }
}

double saddle_tolerance(const MarketInstance& inst, double value) {
  return (inst.fixed_demand() ? 1e-7 : 1e-6) * (1.0 + std::abs(value));
}

}  // namespace

const char* to_string(WorstCaseSource s) {
  return s == WorstCaseSource::duals ? "duals" : "inner_program";
}

InnerWorstCase worst_case_cost_term(const MarketInstance& inst, const MatrixXd& x) {
  const MatrixXd w = inst.scaling().cwiseProduct(x);
  const LinearMax lm = maximize_linear(inst.lifted_uncertainty(), flatten_scenario(w));
  return {lm.value, unflatten_scenario(lm.argmax, inst.num_producers(), inst.periods)};
}

std::vector<MatrixXd> lifted_vertices(const MarketInstance& inst) {
  const std::vector<VectorXd> base = enumerate_vertices(inst.uncertainty);
  const Index n = inst.num_producers();
  std::vector<MatrixXd> out;
  std::vector<size_t> idx(static_cast<size_t>(inst.periods), 0);
  if (base.empty()) return out;
  for (;;) {
    MatrixXd u(n, inst.periods);
    for (Index t = 0; t < inst.periods; ++t) u.col(t) = base[idx[static_cast<size_t>(t)]];
    out.push_back(u);
    Index t = inst.periods - 1;
    while (t >= 0 && ++idx[static_cast<size_t>(t)] == base.size()) {
      idx[static_cast<size_t>(t)] = 0;
      --t;
    }
    if (t < 0) break;
  }
  return out;
}

RobustMarketResult solve_robust_market_fixed(const MarketInstance& inst, const SolveOptions& opt) {
  inst.fixed();
  RobustMarketResult res;
  res.solution = solve_planner(inst, strict_robust_costs(inst), opt);
  const MatrixXd& x = res.solution.production;
  const InnerWorstCase wc = worst_case_cost_term(inst, x);
  res.value = total_cost(inst, x, res.solution.capacities, perceived_costs(inst, MatrixXd::Zero(x.rows(), x.cols()))) +
              wc.value;
  res.worst_u = wc.u;
  return res;
}

RobustMarketResult solve_robust_market_elastic(const MarketInstance& inst, const SolveOptions& opt) {
  inst.elastic();
  RobustMarketResult res;
  res.solution = solve_planner(inst, strict_robust_costs(inst), opt);
  const MatrixXd& x = res.solution.production;
  const InnerWorstCase wc = worst_case_cost_term(inst, x);
  res.value = welfare(inst, x, res.solution.capacities, perceived_costs(inst, MatrixXd::Zero(x.rows(), x.cols()))) -
              wc.value;
  res.worst_u = wc.u;
  return res;
}

RobustMarketResult solve_robust_market(const MarketInstance& inst, const SolveOptions& opt) {
  return inst.fixed_demand() ? solve_robust_market_fixed(inst, opt) : solve_robust_market_elastic(inst, opt);
}

namespace {

// Strict robust planner with the adversary dualized per period:
//   variables x (i*T+t), y (N*T+i), z (N*T+N + t*m'+k)
//   rows      x - y <= 0                      (i*T+t)
//             sum_k P'_{k,i} z_{t,k} - a_{i,t} x_{i,t} >= 0   (N*T + t*N + i)
//             sum_i x_{i,t} = d_t              (2*N*T + t, fixed demand only)
RobustMarketResult solve_robust_cp_impl(const MarketInstance& inst, const SolveOptions& opt) {
  inst.check();
  const Index n = inst.num_producers();
  const Index periods = inst.periods;
  const Index mp = inst.uncertainty.num_rows();
  const bool fixed = inst.fixed_demand();
  const double s = fixed ? 1.0 : -1.0;
  const MatrixXd a = inst.scaling();
  const MatrixXd& pp = inst.uncertainty.P;

  ProgramBuilder b(fixed ? Sense::minimize : Sense::maximize);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) {
      const double c = inst.producers[static_cast<size_t>(i)].c_var;
      b.add_variable(fixed ? c : inst.elastic().alpha(t) - c);
    }
  }
  for (Index i = 0; i < n; ++i) b.add_variable(s * inst.producers[static_cast<size_t>(i)].c_inv);
  for (Index t = 0; t < periods; ++t) {
    for (Index k = 0; k < mp; ++k) b.add_variable(s * inst.uncertainty.r(k));
  }
  const auto xi = [periods](Index i, Index t) { return i * periods + t; };
  const Index y0 = n * periods;
  const Index z0 = y0 + n;

  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) b.add_row({{xi(i, t), 1.0}, {y0 + i, -1.0}}, RowKind::less_equal, 0.0);
  }
  const Index dual_row0 = b.num_rows();
  for (Index t = 0; t < periods; ++t) {
    for (Index i = 0; i < n; ++i) {
      std::vector<std::pair<Index, double>> row;
      for (Index k = 0; k < mp; ++k) {
        if (pp(k, i) != 0.0) row.emplace_back(z0 + t * mp + k, pp(k, i));
      }
      row.emplace_back(xi(i, t), -a(i, t));
      b.add_row(row, RowKind::greater_equal, 0.0);
    }
  }
  const Index clear_row0 = b.num_rows();
  SolveOutcome out;
  if (fixed) {
    for (Index t = 0; t < periods; ++t) {
      std::vector<std::pair<Index, double>> row;
      for (Index i = 0; i < n; ++i) row.emplace_back(xi(i, t), 1.0);
      b.add_row(row, RowKind::equal, inst.fixed().d(t));
    }
    const LpSpec spec = b.lp();
    out = solve_lp(spec, opt.tol);
    require_optimal(out, "robust planner LP");
    if (opt.least_norm) out = select_least_norm(spec, out, opt.tol);
  } else {
    const AffineDemand& e = inst.elastic();
    for (Index t = 0; t < periods; ++t) {
      for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) b.add_quadratic(xi(i, t), xi(j, t), -e.beta(t));
      }
    }
    const QpSpec spec = b.qp();
    out = solve_qp(spec, opt.tol);
    require_optimal(out, "robust planner QP");
    if (opt.least_norm) out = select_least_norm(spec, out, opt.tol);
  }

  RobustMarketResult res;
  EquilibriumSolution& sol = res.solution;
  sol.production = MatrixXd(n, periods);
  sol.capacity_rents = MatrixXd(n, periods);
  MatrixXd u_dual(n, periods);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) {
      sol.production(i, t) = out.primal(xi(i, t));
      sol.capacity_rents(i, t) = -s * out.duals(i * periods + t);
      u_dual(i, t) = s * out.duals(dual_row0 + t * n + i);
    }
  }
  sol.capacities = out.primal.segment(y0, n);
  sol.objective = out.objective;
  sol.certificate = out.certificate;
  if (fixed) {
    sol.prices = out.duals.segment(clear_row0, periods);
  } else {
    const VectorXd xbar = sol.total_production();
    sol.prices.resize(periods);
    for (Index t = 0; t < periods; ++t) sol.prices(t) = inst.elastic().price(t, xbar(t));
  }
  res.value = out.objective;

  const Polytope lifted = inst.lifted_uncertainty();
  const double tol = saddle_tolerance(inst, res.value);
  const double at_dual = evaluate_objective(inst, sol.production, sol.capacities, perceived_costs(inst, u_dual));
  if (lifted.contains(flatten_scenario(u_dual), 1e-7) && std::abs(at_dual - res.value) <= tol) {
    res.worst_u = u_dual;
    res.worst_u_source = WorstCaseSource::duals;
    res.saddle_gap = std::abs(at_dual - res.value);
  } else {
    res.worst_u = worst_case_cost_term(inst, sol.production).u;
    res.worst_u_source = WorstCaseSource::inner_program;
    res.saddle_gap = std::abs(
        evaluate_objective(inst, sol.production, sol.capacities, perceived_costs(inst, res.worst_u)) - res.value);
  }
  return res;
}

}  // namespace

RobustMarketResult solve_robust_cp_fixed(const MarketInstance& inst, const SolveOptions& opt) {
  inst.fixed();
  return solve_robust_cp_impl(inst, opt);
}

RobustMarketResult solve_robust_cp_elastic(const MarketInstance& inst, const SolveOptions& opt) {
  inst.elastic();
  return solve_robust_cp_impl(inst, opt);
}

RobustMarketResult solve_robust_cp(const MarketInstance& inst, const SolveOptions& opt) {
  return solve_robust_cp_impl(inst, opt);
}

MarketRobustReport analyze_robust_market(const MarketInstance& inst, const SolveOptions& opt) {
  MarketRobustReport rep;
  rep.market = solve_robust_market(inst, opt);
  rep.planner = solve_robust_cp(inst, opt);
  rep.E = rep.market.value;
  rep.C = rep.planner.value;
  rep.tau = tau(inst.uncertainty).tau;
  const double slack = 1e-7 * (1.0 + std::abs(rep.C));
  rep.order_ok = inst.fixed_demand() ? rep.C <= rep.E + slack : rep.E <= rep.C + slack;
  return rep;
}

}  // namespace peakload
