#include "peakload/numsolve.hpp"

#include <algorithm>
#include <cmath>

namespace peakload {

Certificate certify(const QpSpec& spec, const SolveOutcome& outcome, const Tolerances& tol) {
  Certificate cert;
  if (!outcome.optimal()) return cert;
  const Index n = spec.num_vars();
  const Index m = spec.num_rows();
  if (outcome.primal.size() != n || outcome.duals.size() != m) return cert;

  // Everything below is in minimization orientation.
  const double s = spec.sense == Sense::minimize ? 1.0 : -1.0;
  const VectorXd& x = outcome.primal;
  const MatrixXd q = spec.quadratic.size() ? MatrixXd(s * spec.quadratic) : MatrixXd::Zero(n, n);
  const VectorXd c = s * spec.cost;
  const VectorXd y = s * outcome.duals;
  const VectorXd lb = spec.lower_bounds();
  const VectorXd ub = spec.upper_bounds();
  const VectorXd qx = q * x;
  const VectorXd rc = c + qx - spec.matrix.transpose() * y;
  const VectorXd act = spec.matrix * x;

  double primal = 0.0, dual = 0.0, comp = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double slack = act(i) - spec.rhs(i);
    switch (spec.kinds[static_cast<size_t>(i)]) {
      case RowKind::greater_equal:
        primal = std::max(primal, -slack);
        dual = std::max(dual, -y(i));
        break;
      case RowKind::less_equal:
        primal = std::max(primal, slack);
        dual = std::max(dual, y(i));
        break;
      case RowKind::equal:
        primal = std::max(primal, std::abs(slack));
        break;
    }
    comp = std::max(comp, std::abs(y(i) * slack));
  }

  double dual_obj = spec.rhs.dot(y) - 0.5 * x.dot(qx);
  for (Index j = 0; j < n; ++j) {
    primal = std::max(primal, lb(j) - x(j));
    if (std::isfinite(ub(j))) primal = std::max(primal, x(j) - ub(j));
    const double v = std::max(rc(j), 0.0);
    const double w = std::max(-rc(j), 0.0);
    comp = std::max(comp, v * std::abs(x(j) - lb(j)));
    if (std::isfinite(ub(j))) {
      comp = std::max(comp, w * std::abs(ub(j) - x(j)));
      dual_obj += v * lb(j) - w * ub(j);
    } else {
      dual = std::max(dual, w);
      dual_obj += v * lb(j) - w * x(j);
    }
  }
  const double primal_obj = c.dot(x) + 0.5 * x.dot(qx);

  cert.primal_residual = primal;
  cert.dual_residual = dual;
  cert.complementarity = comp;
  cert.duality_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
  const double bscale = 1.0 + (m ? spec.rhs.cwiseAbs().maxCoeff() : 0.0);
  const double cscale = 1.0 + (n ? spec.cost.cwiseAbs().maxCoeff() : 0.0);
  cert.ok = primal <= tol.feas * bscale && dual <= tol.feas * cscale &&
            comp <= tol.feas * (1.0 + std::abs(primal_obj)) * bscale && cert.duality_gap <= tol.cert;
  return cert;
}

Certificate certify(const LpSpec& spec, const SolveOutcome& outcome, const Tolerances& tol) {
  return certify(QpSpec(spec), outcome, tol);
}

}  // namespace peakload
