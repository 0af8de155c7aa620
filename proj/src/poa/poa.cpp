#include "peakload/poa.hpp"

#include "peakload/errors.hpp"

#include <cmath>
#include <limits>

namespace peakload {
namespace {

double safe_ratio(double num, double den, double tol) {
  if (std::abs(den) <= tol) return std::abs(num) <= tol ? 1.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

std::optional<double> restricted_rho(const MarketInstance& inst) {
  double rho = 0.0;
  for (const Producer& p : inst.producers) {
    for (Index t = 0; t < inst.periods; ++t) {
      const double a = p.a_at(t);
      if (a <= 0.0) continue;
      if (p.c_var <= 0.0) return std::nullopt;
      rho = std::max(rho, a / p.c_var);
    }
  }
  return rho;
}

PoAReport poa_fixed(const MarketInstance& inst, const SolveOptions& opt) {
  inst.fixed();
  PoAReport rep;
  rep.fixed_demand = true;
  rep.detail = analyze_robust_market(inst, opt);
  rep.E = rep.detail.E;
  rep.C = rep.detail.C;
  rep.tau = rep.detail.tau;
  rep.bound = 1.0 / rep.tau;
  rep.rho = restricted_rho(inst);
  if (rep.rho) rep.bound = std::min(*rep.bound, (1.0 + *rep.rho) / (1.0 + *rep.rho * rep.tau));
  rep.zero_cost = std::abs(rep.C) <= 1e-12;
  if (rep.zero_cost) {
    rep.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    rep.ratio = rep.E / rep.C;
    rep.within_bound = rep.ratio <= *rep.bound + 1e-7;
  }
  return rep;
}

PoAReport poa_elastic(const MarketInstance& inst, const SolveOptions& opt) {
  inst.elastic();
  PoAReport rep;
  rep.fixed_demand = false;
  rep.detail = analyze_robust_market(inst, opt);
  rep.E = rep.detail.E;
  rep.C = rep.detail.C;
  rep.tau = rep.detail.tau;
  rep.ratio = safe_ratio(rep.C, rep.E, 1e-12);
  return rep;
}

PoAReport poa(const MarketInstance& inst, const SolveOptions& opt) {
  return inst.fixed_demand() ? poa_fixed(inst, opt) : poa_elastic(inst, opt);
}

namespace {

MarketInstance single_period_unit_demand(const Polytope& U, double c_var, double a_first, double a_rest) {
  MarketInstance inst;
  inst.periods = 1;
  inst.demand = FixedDemand{VectorXd::Ones(1)};
  inst.uncertainty = U;
  for (Index i = 0; i < U.dim(); ++i) inst.producers.push_back({0.0, c_var, i == 0 ? a_first : a_rest, {}});
  inst.check();
  return inst;
}

}  // namespace

MarketInstance gen_tight_instance_fixed(const Polytope& U, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::bad_delta, "delta must lie in (0, 1)");
  return single_period_unit_demand(U, 0.0, 1.0 - delta, 1.0);
}

MarketInstance gen_tight_instance_restricted(const Polytope& U, double rho, double delta) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::bad_params, "rho must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::bad_params, "delta must lie in (0, 1)");
  return single_period_unit_demand(U, 1.0, rho * (1.0 - delta), rho);
}

ElasticFamily gen_elastic_family(double alpha, double epsilon) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::bad_alpha, "alpha must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::bad_params, "epsilon must lie in (0, 1)");
  ElasticFamily f;
  MarketInstance& inst = f.instance;
  inst.periods = 1;
  AffineDemand dem;
  dem.alpha = VectorXd::Constant(1, alpha);
  dem.beta = VectorXd::Ones(1);
  inst.demand = dem;
  inst.uncertainty = Polytope::simplex(2);
  inst.producers = {{0.0, 0.0, 1.0, {}}, {0.0, epsilon, 1.0, {}}};
  inst.check();
  f.E_closed = alpha > 1.0 ? 0.5 * (alpha - 1.0) * (alpha - 1.0) : 0.0;
  f.C_closed = alpha > 0.5 ? 0.5 * (alpha - 0.5) * (alpha - 0.5) : 0.0;
  return f;
}

double restricted_closed_form(double rho, double delta, double tau) {
  return (1.0 + rho * (1.0 - delta)) / (1.0 + rho * tau);
}

}  // namespace peakload
