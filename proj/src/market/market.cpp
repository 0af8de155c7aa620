#include "peakload/errors.hpp"
#include "peakload/market.hpp"

#include <cmath>
#include <string>

namespace peakload {
namespace {

void require_finite_nonneg(double v, const std::string& field) {
  if (!std::isfinite(v) || v < 0.0) {
    throw Error(ErrorCode::invalid_input, field + " must be finite and nonnegative");
  }
}

}  // namespace

const FixedDemand& MarketInstance::fixed() const {
  if (const auto* f = std::get_if<FixedDemand>(&demand)) return *f;
  throw Error(ErrorCode::wrong_demand_mode, "operation requires fixed demand");
}

const AffineDemand& MarketInstance::elastic() const {
  if (const auto* e = std::get_if<AffineDemand>(&demand)) return *e;
  throw Error(ErrorCode::wrong_demand_mode, "operation requires elastic demand");
}

MatrixXd MarketInstance::scaling() const {
  MatrixXd a(num_producers(), periods);
  for (Index i = 0; i < num_producers(); ++i) {
    for (Index t = 0; t < periods; ++t) a(i, t) = producers[static_cast<size_t>(i)].a_at(t);
  }
  return a;
}

VectorXd MarketInstance::c_var() const {
  VectorXd c(num_producers());
  for (Index i = 0; i < num_producers(); ++i) c(i) = producers[static_cast<size_t>(i)].c_var;
  return c;
}

VectorXd MarketInstance::c_inv() const {
  VectorXd c(num_producers());
  for (Index i = 0; i < num_producers(); ++i) c(i) = producers[static_cast<size_t>(i)].c_inv;
  return c;
}

void MarketInstance::check() const {
  if (producers.empty()) throw Error(ErrorCode::invalid_input, "producers: at least one producer required");
  if (periods < 1) throw Error(ErrorCode::invalid_input, "periods: must be at least 1");
  for (size_t i = 0; i < producers.size(); ++i) {
    const Producer& p = producers[i];
    const std::string at = "producers[" + std::to_string(i) + "].";
    require_finite_nonneg(p.c_inv, at + "c_inv");
    require_finite_nonneg(p.c_var, at + "c_var");
    require_finite_nonneg(p.a, at + "a");
    if (p.a_per_period) {
      if (p.a_per_period->size() != periods) {
        throw Error(ErrorCode::invalid_input, at + "a_per_period: length must equal periods");
      }
      for (Index t = 0; t < periods; ++t) require_finite_nonneg((*p.a_per_period)(t), at + "a_per_period");
    }
  }
  if (const auto* f = std::get_if<FixedDemand>(&demand)) {
    if (f->d.size() != periods) throw Error(ErrorCode::invalid_input, "demand.d: length must equal periods");
    for (Index t = 0; t < periods; ++t) require_finite_nonneg(f->d(t), "demand.d");
  } else {
    const auto& e = std::get<AffineDemand>(demand);
    if (e.alpha.size() != periods || e.beta.size() != periods) {
      throw Error(ErrorCode::invalid_input, "demand.alpha/beta: length must equal periods");
    }
    for (Index t = 0; t < periods; ++t) {
      if (!std::isfinite(e.alpha(t))) throw Error(ErrorCode::invalid_input, "demand.alpha must be finite");
      if (!std::isfinite(e.beta(t)) || e.beta(t) <= 0.0) {
        throw Error(ErrorCode::invalid_input, "demand.beta must be finite and positive");
      }
    }
  }
  if (uncertainty.dim() != num_producers()) {
    throw Error(ErrorCode::invalid_input, "uncertainty: dimension " + std::to_string(uncertainty.dim()) +
                                              " does not match producer count " +
                                              std::to_string(num_producers()));
  }
}

VectorXd flatten_scenario(const MatrixXd& u) {
  const Index n = u.rows();
  VectorXd v(u.size());
  for (Index t = 0; t < u.cols(); ++t) v.segment(t * n, n) = u.col(t);
  return v;
}

MatrixXd unflatten_scenario(const VectorXd& u, Index producers, Index periods) {
  MatrixXd m(producers, periods);
  for (Index t = 0; t < periods; ++t) m.col(t) = u.segment(t * producers, producers);
  return m;
}

MatrixXd perceived_costs(const MarketInstance& inst, const MatrixXd& u) {
  const MatrixXd a = inst.scaling();
  MatrixXd c = a.cwiseProduct(u);
  c.colwise() += inst.c_var();
  return c;
}

MatrixXd strict_robust_costs(const MarketInstance& inst) {
  const ValidationReport rep = validate(inst.uncertainty);
  if (!rep.nonempty) throw Error(ErrorCode::empty_set, "uncertainty set is empty");
  if (!rep.bounded) throw Error(ErrorCode::unbounded_set, "uncertainty set is unbounded");
  MatrixXd u(inst.num_producers(), inst.periods);
  for (Index t = 0; t < inst.periods; ++t) u.col(t) = rep.axis_maxima;
  return perceived_costs(inst, u);
}

EquilibriumSolution solve_planner(const MarketInstance& inst, const MatrixXd& var_cost, const SolveOptions& opt) {
  inst.check();
  const Index n = inst.num_producers();
  const Index periods = inst.periods;
  if (var_cost.rows() != n || var_cost.cols() != periods) {
    throw Error(ErrorCode::invalid_input, "variable cost matrix must be N x T");
  }
  const bool fixed = inst.fixed_demand();
  const double s = fixed ? 1.0 : -1.0;  // costs enter a max problem negated

  ProgramBuilder b(fixed ? Sense::minimize : Sense::maximize);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) {
      b.add_variable(fixed ? var_cost(i, t) : inst.elastic().alpha(t) - var_cost(i, t));
    }
  }
  for (Index i = 0; i < n; ++i) b.add_variable(s * inst.producers[static_cast<size_t>(i)].c_inv);
  const auto xi = [periods](Index i, Index t) { return i * periods + t; };
  const Index y0 = n * periods;

  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) b.add_row({{xi(i, t), 1.0}, {y0 + i, -1.0}}, RowKind::less_equal, 0.0);
  }
  SolveOutcome out;
  if (fixed) {
    const VectorXd& d = inst.fixed().d;
    for (Index t = 0; t < periods; ++t) {
      std::vector<std::pair<Index, double>> row;
      for (Index i = 0; i < n; ++i) row.emplace_back(xi(i, t), 1.0);
      b.add_row(row, RowKind::equal, d(t));
    }
    const LpSpec spec = b.lp();
    out = solve_lp(spec, opt.tol);
    if (out.optimal() && opt.least_norm) out = select_least_norm(spec, out, opt.tol);
  } else {
    const AffineDemand& e = inst.elastic();
    for (Index t = 0; t < periods; ++t) {
      for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) b.add_quadratic(xi(i, t), xi(j, t), -e.beta(t));
      }
    }
    const QpSpec spec = b.qp();
    out = solve_qp(spec, opt.tol);
    if (out.optimal() && opt.least_norm) out = select_least_norm(spec, out, opt.tol);
  }
  if (!out.optimal()) {
    throw StatusError(out.status, "planner problem");
  }

  EquilibriumSolution sol;
  sol.production = MatrixXd(n, periods);
  sol.capacity_rents = MatrixXd(n, periods);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) {
      sol.production(i, t) = out.primal(xi(i, t));
      sol.capacity_rents(i, t) = -s * out.duals(i * periods + t);
    }
  }
  sol.capacities = out.primal.segment(y0, n);
  sol.objective = out.objective;
  sol.certificate = out.certificate;
  sol.prices = VectorXd(periods);
  if (fixed) {
    sol.prices = out.duals.segment(n * periods, periods);
  } else {
    const VectorXd xbar = sol.total_production();
    for (Index t = 0; t < periods; ++t) sol.prices(t) = inst.elastic().price(t, xbar(t));
  }
  return sol;
}

EquilibriumSolution solve_nominal_fixed(const MarketInstance& inst, const SolveOptions& opt) {
  inst.fixed();
  return solve_planner(inst, perceived_costs(inst, MatrixXd::Zero(inst.num_producers(), inst.periods)), opt);
}

EquilibriumSolution solve_nominal_elastic(const MarketInstance& inst, const SolveOptions& opt) {
  inst.elastic();
  return solve_planner(inst, perceived_costs(inst, MatrixXd::Zero(inst.num_producers(), inst.periods)), opt);
}

EquilibriumSolution solve_nominal(const MarketInstance& inst, const SolveOptions& opt) {
  return inst.fixed_demand() ? solve_nominal_fixed(inst, opt) : solve_nominal_elastic(inst, opt);
}

EquilibriumSolution solve_expected(const MarketInstance& inst, const MatrixXd& mean_u, const SolveOptions& opt) {
  if (mean_u.rows() != inst.num_producers() || mean_u.cols() != inst.periods) {
    throw Error(ErrorCode::bad_mean, "mean_u must be N x T");
  }
  if (!mean_u.allFinite() || (mean_u.array() < 0.0).any() || (mean_u.array() > 1.0).any()) {
    throw Error(ErrorCode::bad_mean, "mean_u entries must lie in [0,1]");
  }
  return solve_planner(inst, perceived_costs(inst, mean_u), opt);
}

double total_cost(const MarketInstance& inst, const MatrixXd& x, const VectorXd& y, const MatrixXd& var_cost) {
  return inst.c_inv().dot(y) + var_cost.cwiseProduct(x).sum();
}

double welfare(const MarketInstance& inst, const MatrixXd& x, const VectorXd& y, const MatrixXd& var_cost) {
  const AffineDemand& e = inst.elastic();
  const VectorXd xbar = x.colwise().sum().transpose();
  double w = 0.0;
  for (Index t = 0; t < inst.periods; ++t) w += e.surplus(t, xbar(t));
  return w - total_cost(inst, x, y, var_cost);
}

double evaluate_objective(const MarketInstance& inst, const MatrixXd& x, const VectorXd& y,
                          const MatrixXd& var_cost) {
  return inst.fixed_demand() ? total_cost(inst, x, y, var_cost) : welfare(inst, x, y, var_cost);
}

}  // namespace peakload
