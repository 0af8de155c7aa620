#include "peakload/subsidy.hpp"

#include "peakload/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace peakload {
namespace {

constexpr double kCapacityFloor = 1e-9;

}  // namespace

const char* to_string(KktCondition c) {
  switch (c) {
    case KktCondition::stationarity_x: return "stationarity_x";
    case KktCondition::stationarity_y: return "stationarity_y";
    case KktCondition::capacity_feasibility: return "capacity_feasibility";
    case KktCondition::nonnegativity: return "nonnegativity";
    case KktCondition::pinned_capacity: return "pinned_capacity";
    case KktCondition::multiplier_sign: return "multiplier_sign";
    case KktCondition::capacity_complementarity: return "capacity_complementarity";
    case KktCondition::nonnegativity_complementarity: return "nonnegativity_complementarity";
  }
  return "unknown";
}

double FixedCapacityWelfareResult::max_kkt_residual() const {
  return *std::max_element(kkt_residuals.begin(), kkt_residuals.end());
}

FixedCapacityWelfareResult solve_fixed_capacity_welfare(const MarketInstance& inst, const VectorXd& y_star,
                                                        const MatrixXd& u, const SolveOptions& opt) {
  const AffineDemand& dem = inst.elastic();
  const Index n = inst.num_producers();
  const Index periods = inst.periods;
  if (y_star.size() != n || (y_star.array() < 0.0).any() || !y_star.allFinite()) {
    throw Error(ErrorCode::invalid_input, "y_star must be a nonnegative vector with one entry per producer");
  }
  if (u.rows() != n || u.cols() != periods) throw Error(ErrorCode::invalid_input, "scenario must be N x T");
  if (!inst.lifted_uncertainty().contains(flatten_scenario(u), 1e-7)) {
    throw Error(ErrorCode::invalid_input, "scenario lies outside the uncertainty set");
  }
  const MatrixXd cost = perceived_costs(inst, u);

  // Variables x (i*T+t), y (N*T+i); rows x - y <= 0 (i*T+t), y = y* (N*T+i).
  ProgramBuilder b(Sense::maximize);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) b.add_variable(dem.alpha(t) - cost(i, t));
  }
  for (Index i = 0; i < n; ++i) b.add_variable(-inst.producers[static_cast<size_t>(i)].c_inv);
  const Index y0 = n * periods;
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) b.add_row({{i * periods + t, 1.0}, {y0 + i, -1.0}}, RowKind::less_equal, 0.0);
  }
  for (Index i = 0; i < n; ++i) b.add_row({{y0 + i, 1.0}}, RowKind::equal, y_star(i));
  for (Index t = 0; t < periods; ++t) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i; j < n; ++j) b.add_quadratic(i * periods + t, j * periods + t, -dem.beta(t));
    }
  }
  const QpSpec spec = b.qp();
  SolveOutcome out = solve_qp(spec, opt.tol);
  if (!out.optimal()) {
    throw StatusError(out.status, "pinned-capacity welfare problem");
  }
  if (opt.least_norm) out = select_least_norm(spec, out, opt.tol);

  FixedCapacityWelfareResult r;
  r.u = u;
  r.objective = out.objective;
  r.production.resize(n, periods);
  r.mu.resize(n, periods);
  r.phi.resize(n, periods);
  r.chi.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) {
      const Index k = i * periods + t;
      r.production(i, t) = out.primal(k);
      r.mu(i, t) = out.duals(k);
      r.phi(i, t) = -out.reduced_costs(k);
    }
    r.chi(i) = out.duals(y0 + i);
    // With y*_i = 0 the bound y_i >= 0 is active too; its multiplier is
    // indistinguishable from the pinning one.
    if (y_star(i) <= kCapacityFloor) r.chi(i) += out.reduced_costs(y0 + i);
  }
  const VectorXd y = out.primal.segment(y0, n);
  const VectorXd xbar = r.production.colwise().sum().transpose();
  r.prices.resize(periods);
  for (Index t = 0; t < periods; ++t) r.prices(t) = dem.price(t, xbar(t));

  auto& res = r.kkt_residuals;
  res.fill(0.0);
  const auto bump = [&](KktCondition c, double v) {
    double& slot = res[static_cast<size_t>(c)];
    slot = std::max(slot, v);
  };
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < periods; ++t) {
      const double x = r.production(i, t);
      bump(KktCondition::stationarity_x, std::abs(r.prices(t) - cost(i, t) - r.mu(i, t) + r.phi(i, t)));
      bump(KktCondition::capacity_feasibility, std::max(0.0, x - y(i)));
      bump(KktCondition::nonnegativity, std::max(0.0, -x));
      bump(KktCondition::multiplier_sign, std::max({0.0, -r.mu(i, t), -r.phi(i, t)}));
      bump(KktCondition::capacity_complementarity, std::abs(r.mu(i, t) * (y(i) - x)));
      bump(KktCondition::nonnegativity_complementarity, std::abs(r.phi(i, t) * x));
    }
    bump(KktCondition::stationarity_y,
         std::abs(-inst.producers[static_cast<size_t>(i)].c_inv + r.mu.row(i).sum() - r.chi(i)));
    bump(KktCondition::pinned_capacity, std::abs(y(i) - y_star(i)));
  }
  return r;
}

double lemma_value(const MarketInstance& inst, const FixedCapacityWelfareResult& r, Index producer) {
  const MatrixXd cost = perceived_costs(inst, r.u);
  double v = 0.0;
  for (Index t = 0; t < inst.periods; ++t) {
    if (r.production(producer, t) > 1e-9) v += cost(producer, t) - r.prices(t);
  }
  return v;
}

SubsidyBundle compute_subsidies(const MarketInstance& inst, int audit_samples, std::uint64_t seed,
                                const SolveOptions& opt) {
  inst.elastic();
  inst.check();
  if (audit_samples < 0) throw Error(ErrorCode::invalid_input, "audit sample count must be nonnegative");
  const Index n = inst.num_producers();
  const RobustMarketResult planner = solve_robust_cp_elastic(inst, opt);

  SubsidyBundle bundle;
  bundle.planner_value = planner.value;
  bundle.y_star = planner.solution.capacities.unaryExpr([](double v) { return v <= kCapacityFloor ? 0.0 : v; });
  bundle.seed = seed;
  bundle.audit_samples = audit_samples;
  if (bundle.y_star.maxCoeff() <= kCapacityFloor) {
    throw Error(ErrorCode::no_capacity, "the robust planner installs no capacity; nothing to subsidize");
  }

  const std::vector<MatrixXd> vertices = lifted_vertices(inst);
  bundle.lemma_values.resize(n, static_cast<Index>(vertices.size()));
  for (size_t k = 0; k < vertices.size(); ++k) {
    bundle.scenario_results.push_back(solve_fixed_capacity_welfare(inst, bundle.y_star, vertices[k], opt));
    for (Index i = 0; i < n; ++i) {
      bundle.lemma_values(i, static_cast<Index>(k)) = lemma_value(inst, bundle.scenario_results.back(), i);
    }
  }
  const VectorXd vertex_max = bundle.lemma_values.rowwise().maxCoeff();
  bundle.eta = VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (bundle.y_star(i) > kCapacityFloor) bundle.eta(i) = inst.producers[static_cast<size_t>(i)].c_inv + vertex_max(i);
  }

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (int s = 0; s < audit_samples; ++s) {
    MatrixXd u = MatrixXd::Zero(n, inst.periods);
    std::vector<double> w(vertices.size());
    double total = 0.0;
    for (auto& wi : w) total += (wi = expo(rng));
    for (size_t k = 0; k < vertices.size(); ++k) u += (w[k] / total) * vertices[k];
    const FixedCapacityWelfareResult r = solve_fixed_capacity_welfare(inst, bundle.y_star, u, opt);
    for (Index i = 0; i < n; ++i) {
      if (bundle.y_star(i) <= kCapacityFloor) continue;
      const double v = lemma_value(inst, r, i);
      if (v > vertex_max(i) + 1e-6) bundle.audit_flags.push_back({i, u, v, v - vertex_max(i)});
    }
  }
  bundle.verification = verify_subsidized_equilibrium(inst, bundle);
  return bundle;
}

void EquilibriumVerification::require() const {
  if (is_equilibrium) return;
  std::ostringstream msg;
  if (violations.empty()) {
    msg << "equilibrium checks failed";
  } else {
    const EquilibriumViolation& v = violations.front();
    msg << v.check << " violated by " << v.amount << " (producer " << v.producer << ", scenario " << v.scenario
        << ", capacity " << v.deviation << ")";
  }
  throw Error(ErrorCode::not_equilibrium, msg.str());
}

EquilibriumVerification verify_subsidized_equilibrium(const MarketInstance& inst, const SubsidyBundle& bundle,
                                                      int grid) {
  if (grid < 2) throw Error(ErrorCode::invalid_input, "deviation grid needs at least two points");
  const Index n = inst.num_producers();
  const Index periods = inst.periods;
  const Index ns = static_cast<Index>(bundle.scenario_results.size());
  const double tol = 1e-6;
  EquilibriumVerification v;
  v.best_response_ok = v.zero_profit_ok = v.deviation_ok = true;

  // margin(i, k): per-unit-capacity operating profit of a best response.
  MatrixXd margin(n, ns);
  for (Index k = 0; k < ns; ++k) {
    const FixedCapacityWelfareResult& r = bundle.scenario_results[static_cast<size_t>(k)];
    const MatrixXd cost = perceived_costs(inst, r.u);
    for (Index i = 0; i < n; ++i) {
      double m = 0.0;
      for (Index t = 0; t < periods; ++t) {
        const double gap = r.prices(t) - cost(i, t);
        const double x = r.production(i, t);
        m += std::max(gap, 0.0);
        double off = 0.0;
        if (gap > tol) off = bundle.y_star(i) - x;
        if (gap < -tol) off = x;
        if (off > tol) {
          v.best_response_ok = false;
          v.violations.push_back({i, k, bundle.y_star(i), "best_response", off});
        }
      }
      margin(i, k) = m;
    }
  }

  const auto worst_profit = [&](Index i, double y, Index* arg) {
    const double net_inv = inst.producers[static_cast<size_t>(i)].c_inv - bundle.eta(i);
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < ns; ++k) {
      const double p = margin(i, k) * y - net_inv * y;
      if (p < best) {
        best = p;
        if (arg) *arg = k;
      }
    }
    return ns == 0 ? -net_inv * y : best;
  };

  v.worst_case_profits.resize(n);
  v.max_deviation_gain.resize(n);
  const double hi = 2.0 * bundle.y_star.maxCoeff();
  for (Index i = 0; i < n; ++i) {
    Index arg = -1;
    const double base = worst_profit(i, bundle.y_star(i), &arg);
    v.worst_case_profits(i) = base;
    if (bundle.y_star(i) > kCapacityFloor && std::abs(base) > tol) {
      v.zero_profit_ok = false;
      v.violations.push_back({i, arg, bundle.y_star(i), "zero_worst_case_profit", base});
    }
    std::vector<double> trial(static_cast<size_t>(grid));
    for (int g = 0; g < grid; ++g) trial[static_cast<size_t>(g)] = hi * g / (grid - 1);
    trial.push_back(bundle.y_star(i));
    double gain = 0.0;
    double worst_y = bundle.y_star(i);
    Index worst_k = -1;
    for (double y : trial) {
      Index k = -1;
      const double g = worst_profit(i, y, &k) - base;
      if (g > gain) {
        gain = g;
        worst_y = y;
        worst_k = k;
      }
    }
    v.max_deviation_gain(i) = gain;
    if (gain > tol) {
      v.deviation_ok = false;
      v.violations.push_back({i, worst_k, worst_y, "capacity_deviation", gain});
    }
  }
  v.is_equilibrium = v.best_response_ok && v.zero_profit_ok && v.deviation_ok;
  return v;
}

PriceTable build_price_functions(const SubsidyBundle& bundle) {
  PriceTable table;
  for (const auto& r : bundle.scenario_results) {
    table.scenarios.push_back(r.u);
    table.prices.push_back(r.prices);
  }
  return table;
}

VectorXd evaluate_price_function(const MarketInstance& inst, const SubsidyBundle& bundle, const MatrixXd& u,
                                 const SolveOptions& opt) {
  return solve_fixed_capacity_welfare(inst, bundle.y_star, u, opt).prices;
}

}  // namespace peakload
