#include "peakload/errors.hpp"
#include "peakload/robust.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace peakload {

InnerSolve solve_inner(const MarketInstance& inst, const VectorXd& y, const MatrixXd& u, const Tolerances& tol) {
  const Index n = inst.num_producers();
  const Index periods = inst.periods;
  const bool fixed = inst.fixed_demand();
  const MatrixXd cost = perceived_costs(inst, u);
  const double capacity_cost = inst.c_inv().dot(y);

  // Variables x(i*T+t) with 0 <= x <= y_i.
  ProgramBuilder b(fixed ? Sense::minimize : Sense::maximize);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) {
      b.add_variable(fixed ? cost(i, t) : inst.elastic().alpha(t) - cost(i, t), 0.0, std::max(y(i), 0.0));
    }
  }
  InnerSolve res;
  SolveOutcome out;
  if (fixed) {
    for (Index t = 0; t < periods; ++t) {
      std::vector<std::pair<Index, double>> row;
      for (Index i = 0; i < n; ++i) row.emplace_back(i * periods + t, 1.0);
      b.add_row(row, RowKind::equal, inst.fixed().d(t));
    }
    out = solve_lp(b.lp(), tol);
    if (out.status == SolveStatus::infeasible) {
      res.value = std::numeric_limits<double>::infinity();
      return res;
    }
  } else {
    const AffineDemand& e = inst.elastic();
    for (Index t = 0; t < periods; ++t) {
      for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) b.add_quadratic(i * periods + t, j * periods + t, -e.beta(t));
      }
    }
    out = solve_qp(b.qp(), tol);
  }
  if (!out.optimal()) {
    throw StatusError(out.status, "inner program");
  }
  res.production = MatrixXd(n, periods);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) res.production(i, t) = out.primal(i * periods + t);
  }
  if (fixed) {
    res.prices = out.duals;
    res.value = out.objective + capacity_cost;
  } else {
    const VectorXd xbar = res.production.colwise().sum().transpose();
    res.prices.resize(periods);
    for (Index t = 0; t < periods; ++t) res.prices(t) = inst.elastic().price(t, xbar(t));
    res.value = out.objective - capacity_cost;
  }
  return res;
}

void AdjustableCertificate::require() const {
  if (!passed) throw Error(ErrorCode::saddle_violated, failure);
}

AdjustableCertificate verify_adjustable_equivalence(const MarketInstance& inst, const RobustMarketResult& planner,
                                                    int samples, std::uint64_t seed, const Tolerances& tol) {
  if (samples < 1) throw Error(ErrorCode::invalid_input, "samples must be at least 1");
  const bool fixed = inst.fixed_demand();
  AdjustableCertificate cert;
  cert.C = planner.value;
  cert.y_star = planner.solution.capacities;
  cert.worst_u = planner.worst_u;
  cert.seed = seed;

  const std::vector<MatrixXd> vertices = lifted_vertices(inst);
  for (const auto& v : vertices) cert.scenarios.push_back({v, 0.0, true});
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (int s = 0; s < samples && !vertices.empty(); ++s) {
    MatrixXd u = MatrixXd::Zero(inst.num_producers(), inst.periods);
    double total = 0.0;
    std::vector<double> w(vertices.size());
    for (auto& wi : w) total += (wi = expo(rng));
    for (size_t k = 0; k < vertices.size(); ++k) u += (w[k] / total) * vertices[k];
    cert.scenarios.push_back({u, 0.0, false});
  }

  const double scale = 1.0 + std::abs(cert.C);
  std::ostringstream why;
  for (size_t k = 0; k < cert.scenarios.size(); ++k) {
    ScenarioValue& sv = cert.scenarios[k];
    sv.value = solve_inner(inst, cert.y_star, sv.u, tol).value;
    // The adversary wins when it pushes cost above C or welfare below C.
    const double excess = fixed ? sv.value - cert.C : cert.C - sv.value;
    if (excess > cert.max_domination_violation) cert.max_domination_violation = excess;
  }
  const double at_worst = solve_inner(inst, cert.y_star, cert.worst_u, tol).value;
  cert.worst_u_gap = std::abs(at_worst - cert.C);

  const bool dominated = cert.max_domination_violation <= 1e-6 * scale;
  const bool attained = cert.worst_u_gap <= 1e-6 * scale;
  cert.passed = dominated && attained;
  if (!dominated) why << "a sampled scenario moves the inner value past C by " << cert.max_domination_violation << "; ";
  if (!attained) why << "inner value at worst_u differs from C by " << cert.worst_u_gap;
  cert.failure = why.str();
  return cert;
}

ScenarioPlannerResult solve_adjustable_cp_by_vertices(const MarketInstance& inst, const SolveOptions& opt) {
  inst.fixed();
  inst.check();
  const Index n = inst.num_producers();
  const Index periods = inst.periods;
  ScenarioPlannerResult res;
  res.scenarios = lifted_vertices(inst);
  const Index ns = static_cast<Index>(res.scenarios.size());

  // Variables: epigraph tau, y (N), x^s (N*T per scenario).
  ProgramBuilder b(Sense::minimize);
  const Index tau_var = b.add_variable(1.0);
  const Index y0 = b.num_vars();
  for (Index i = 0; i < n; ++i) b.add_variable(inst.producers[static_cast<size_t>(i)].c_inv);
  const auto xs = [&](Index s, Index i, Index t) { return y0 + n + s * n * periods + i * periods + t; };
  for (Index s = 0; s < ns; ++s) {
    for (Index k = 0; k < n * periods; ++k) b.add_variable(0.0);
  }
  res.clearing_rows.assign(static_cast<size_t>(ns), {});
  for (Index s = 0; s < ns; ++s) {
    const MatrixXd cost = perceived_costs(inst, res.scenarios[static_cast<size_t>(s)]);
    std::vector<std::pair<Index, double>> epi{{tau_var, -1.0}};
    for (Index i = 0; i < n; ++i) {
      for (Index t = 0; t < periods; ++t) {
        if (cost(i, t) != 0.0) epi.emplace_back(xs(s, i, t), cost(i, t));
      }
    }
    b.add_row(epi, RowKind::less_equal, 0.0);
    for (Index i = 0; i < n; ++i) {
      for (Index t = 0; t < periods; ++t) b.add_row({{xs(s, i, t), 1.0}, {y0 + i, -1.0}}, RowKind::less_equal, 0.0);
    }
    for (Index t = 0; t < periods; ++t) {
      std::vector<std::pair<Index, double>> row;
      for (Index i = 0; i < n; ++i) row.emplace_back(xs(s, i, t), 1.0);
      res.clearing_rows[static_cast<size_t>(s)].push_back(b.add_row(row, RowKind::equal, inst.fixed().d(t)));
    }
  }
  res.program = b.lp();
  SolveOutcome out = solve_lp(res.program, opt.tol);
  if (!out.optimal()) {
    throw StatusError(out.status, "scenario planner");
  }
  if (opt.least_norm) out = select_least_norm(res.program, out, opt.tol);
  res.value = out.objective;
  res.capacities = out.primal.segment(y0, n);
  res.clearing_duals = MatrixXd(ns, periods);
  for (Index s = 0; s < ns; ++s) {
    MatrixXd x(n, periods);
    for (Index i = 0; i < n; ++i) {
      for (Index t = 0; t < periods; ++t) x(i, t) = out.primal(xs(s, i, t));
    }
    res.production.push_back(x);
    for (Index t = 0; t < periods; ++t) {
      res.clearing_duals(s, t) = out.duals(res.clearing_rows[static_cast<size_t>(s)][static_cast<size_t>(t)]);
    }
  }
  return res;
}

}  // namespace peakload
