#include "peakload/risk.hpp"

#include "peakload/errors.hpp"

#include <cmath>
#include <string>

namespace peakload {
namespace {

constexpr double kZeroScale = 1e-12;

// Q intersected with {q >= 0, sum q = 1}.
Polytope weights_polytope(const CoherentSpec& spec) {
  const Index k = static_cast<Index>(spec.scenarios.size());
  const Index m = spec.Q.num_rows();
  MatrixXd p(m + 2, k);
  VectorXd r(m + 2);
  if (m > 0) {
    p.topRows(m) = spec.Q.P;
    r.head(m) = spec.Q.r;
  }
  p.row(m).setOnes();
  p.row(m + 1).setConstant(-1.0);
  r(m) = 1.0;
  r(m + 1) = -1.0;
  return Polytope(p, r);
}

MatrixXd scenario_matrix(const CoherentSpec& spec) {
  const Index n = spec.scenarios.front().size();
  MatrixXd s(n, static_cast<Index>(spec.scenarios.size()));
  for (size_t j = 0; j < spec.scenarios.size(); ++j) s.col(static_cast<Index>(j)) = spec.scenarios[j];
  return s;
}

}  // namespace

void VarSpec::check() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::bad_var, "alpha must lie in (0, 1)");
  if (marginal_var.size() == 0) throw Error(ErrorCode::bad_var, "marginal_var must not be empty");
  for (Index i = 0; i < marginal_var.size(); ++i) {
    if (!(marginal_var(i) > 0.0) || !std::isfinite(marginal_var(i))) {
      throw Error(ErrorCode::bad_var, "marginal_var[" + std::to_string(i) + "] must be positive and finite");
    }
  }
}

void CoherentSpec::check() const {
  if (scenarios.empty()) throw Error(ErrorCode::invalid_input, "scenarios: at least one scenario required");
  const Index n = scenarios.front().size();
  if (n == 0) throw Error(ErrorCode::invalid_input, "scenarios: empty vectors");
  for (size_t j = 0; j < scenarios.size(); ++j) {
    const VectorXd& s = scenarios[j];
    if (s.size() != n) throw Error(ErrorCode::invalid_input, "scenarios: all scenarios need the same length");
    if (!s.allFinite() || (s.array() < 0.0).any()) {
      throw Error(ErrorCode::invalid_input, "scenarios[" + std::to_string(j) + "] must be finite and nonnegative");
    }
  }
  if (!scenarios.front().isZero(0.0)) throw Error(ErrorCode::invalid_input, "scenarios[0] must be the zero vector");
  if (Q.dim() != static_cast<Index>(scenarios.size())) {
    throw Error(ErrorCode::invalid_input, "Q: dimension must equal the number of scenarios");
  }
}

RiskSet build_mvar_set(const VarSpec& spec) {
  spec.check();
  RiskSet rs;
  rs.set = Polytope::box(spec.marginal_var.size());
  rs.scale = spec.marginal_var;
  rs.report = validate(rs.set);
  return rs;
}

VectorXd coherent_maxima(const CoherentSpec& spec) {
  spec.check();
  const Polytope w = weights_polytope(spec);
  const MatrixXd s = scenario_matrix(spec);
  VectorXd m(s.rows());
  for (Index i = 0; i < s.rows(); ++i) m(i) = maximize_linear(w, s.row(i).transpose()).value;
  return m;
}

RiskSet build_coherent_set(const CoherentSpec& spec) {
  const VectorXd m = coherent_maxima(spec);
  const Index n = m.size();
  const MatrixXd s = scenario_matrix(spec);

  RiskSet rs;
  rs.scale = m;
  std::vector<Index> live;
  for (Index i = 0; i < n; ++i) {
    if (m(i) <= kZeroScale) {
      rs.scale(i) = 0.0;
      rs.degenerate.push_back(i);
      rs.warnings.push_back("DegenerateScenario: coordinate " + std::to_string(i) +
                            " carries no risk; decoupled as [0, 1] with zero scale");
    } else {
      live.push_back(i);
    }
  }

  const Index nl = static_cast<Index>(live.size());
  std::vector<VectorXd> image;
  if (nl > 0) {
    for (const VectorXd& q : enumerate_vertices(weights_polytope(spec))) {
      const VectorXd full = s * q;
      VectorXd p(nl);
      for (Index k = 0; k < nl; ++k) p(k) = full(live[static_cast<size_t>(k)]) / m(live[static_cast<size_t>(k)]);
      bool seen = false;
      for (const auto& other : image) seen = seen || (other - p).cwiseAbs().maxCoeff() <= 1e-12;
      if (!seen) image.push_back(p);
    }
  }
  const Polytope reduced = nl > 0 ? hull_to_polytope(image) : Polytope(MatrixXd(0, 0), VectorXd(0));

  // Embed: live coordinates keep the hull rows, degenerate ones get u_i <= 1.
  const Index rows = reduced.num_rows() + static_cast<Index>(rs.degenerate.size());
  MatrixXd p = MatrixXd::Zero(rows, n);
  VectorXd r(rows);
  for (Index row = 0; row < reduced.num_rows(); ++row) {
    for (Index k = 0; k < nl; ++k) p(row, live[static_cast<size_t>(k)]) = reduced.P(row, k);
    r(row) = reduced.r(row);
  }
  for (size_t d = 0; d < rs.degenerate.size(); ++d) {
    const Index row = reduced.num_rows() + static_cast<Index>(d);
    p(row, rs.degenerate[d]) = 1.0;
    r(row) = 1.0;
  }
  rs.set = Polytope(p, r);
  rs.report = validate(rs.set);
  for (const auto& w : rs.report.warnings) rs.warnings.push_back(w);
  return rs;
}

RiskSet build_risk_set(const RiskSpec& spec) {
  return std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, VarSpec>) {
          return build_mvar_set(s);
        } else {
          return build_coherent_set(s);
        }
      },
      spec);
}

MarketInstance with_risk_set(const MarketInstance& inst, const RiskSet& rs) {
  if (rs.set.dim() != inst.num_producers()) {
    throw Error(ErrorCode::invalid_input, "risk data dimension " + std::to_string(rs.set.dim()) +
                                              " does not match producer count " +
                                              std::to_string(inst.num_producers()));
  }
  MarketInstance out = inst;
  out.uncertainty = rs.set;
  for (Index i = 0; i < out.num_producers(); ++i) {
    Producer& p = out.producers[static_cast<size_t>(i)];
    p.a = rs.scale(i);
    p.a_per_period.reset();
  }
  return out;
}

PoAReport poa_with_risk_set(const MarketInstance& inst, const RiskSpec& spec, const SolveOptions& opt) {
  inst.fixed();
  return poa_fixed(with_risk_set(inst, build_risk_set(spec)), opt);
}

}  // namespace peakload
