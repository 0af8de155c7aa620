#include "peakload/errors.hpp"
#include "peakload/numsolve.hpp"

#include <cmath>
#include <optional>

namespace peakload {

namespace {
constexpr double kActiveMultiplier = 1e-9;
}

SolveOutcome select_least_norm(const QpSpec& spec, const SolveOutcome& outcome, const Tolerances& tol) {
  if (!outcome.optimal() || !outcome.certificate.ok) return outcome;
  const Index n = spec.num_vars();
  const Index m = spec.num_rows();
  const bool has_q = spec.quadratic.size() && spec.quadratic.cwiseAbs().maxCoeff() > 0.0;

  QpSpec face;
  face.sense = Sense::minimize;
  face.cost = VectorXd::Zero(n);
  face.quadratic = MatrixXd::Identity(n, n);
  face.kinds = spec.kinds;
  for (Index i = 0; i < m; ++i) {
    if (std::abs(outcome.duals(i)) > kActiveMultiplier) face.kinds[static_cast<size_t>(i)] = RowKind::equal;
  }
  MatrixXd rows = spec.matrix;
  VectorXd rhs = spec.rhs;
  if (has_q) {
    // Independent rows of Q pin Qx to its optimal value.
    Eigen::ColPivHouseholderQR<MatrixXd> qr(spec.quadratic.transpose());
    qr.setThreshold(1e-10);
    const Index rank = qr.rank();
    const VectorXd qx = spec.quadratic * outcome.primal;
    rows.conservativeResize(m + rank, n);
    rhs.conservativeResize(m + rank);
    for (Index k = 0; k < rank; ++k) {
      const Index src = qr.colsPermutation().indices()(k);
      rows.row(m + k) = spec.quadratic.row(src);
      rhs(m + k) = qx(src);
      face.kinds.push_back(RowKind::equal);
    }
  }
  face.matrix = rows;
  face.rhs = rhs;

  VectorXd lb = spec.lower_bounds();
  VectorXd ub = spec.upper_bounds();
  for (Index j = 0; j < n; ++j) {
    const double rc = outcome.reduced_costs(j);
    const double oriented = spec.sense == Sense::minimize ? rc : -rc;
    if (oriented > kActiveMultiplier) ub(j) = lb(j);
    else if (oriented < -kActiveMultiplier && std::isfinite(ub(j))) lb(j) = ub(j);
  }
  face.lower = lb;
  face.upper = ub;

  SolveOutcome picked;
  try {
    picked = solve_qp(face, tol);
  } catch (const std::exception&) {
    return outcome;
  }
  if (!picked.optimal()) return outcome;

  SolveOutcome result = outcome;
  result.primal = picked.primal;
  const MatrixXd q = spec.quadratic.size() ? spec.quadratic : MatrixXd::Zero(n, n);
  result.objective = spec.cost.dot(result.primal) + 0.5 * result.primal.dot(q * result.primal);
  result.reduced_costs = spec.cost + q * result.primal - spec.matrix.transpose() * result.duals;
  result.active_set.clear();
  const VectorXd act = spec.matrix * result.primal;
  for (Index i = 0; i < m; ++i) {
    if (spec.kinds[static_cast<size_t>(i)] == RowKind::equal ||
        std::abs(act(i) - spec.rhs(i)) <= tol.feas * (1.0 + std::abs(spec.rhs(i)))) {
      result.active_set.push_back(i);
    }
  }
  result.certificate = certify(spec, result, tol);
  if (!result.certificate.ok ||
      std::abs(result.objective - outcome.objective) > tol.cert * (1.0 + std::abs(outcome.objective))) {
    return outcome;
  }
  return result;
}

SolveOutcome select_least_norm(const LpSpec& spec, const SolveOutcome& outcome, const Tolerances& tol) {
  return select_least_norm(QpSpec(spec), outcome, tol);
}

DualCandidateCheck check_dual_candidate(const LpSpec& spec, double primal_objective,
                                        const std::vector<std::pair<Index, double>>& fixed,
                                        const Tolerances& tol) {
  spec.check();
  const Index n = spec.num_vars();
  const Index m = spec.num_rows();
  const double s = spec.sense == Sense::minimize ? 1.0 : -1.0;
  const VectorXd lb = spec.lower_bounds();
  const VectorXd ub = spec.upper_bounds();

  DualCandidateCheck res;
  std::vector<std::optional<double>> fixed_min(static_cast<size_t>(m));
  for (const auto& [i, v] : fixed) {
    if (i < 0 || i >= m) throw Error(ErrorCode::invalid_input, "fixed dual index out of range");
    const double ym = s * v;
    const RowKind k = spec.kinds[static_cast<size_t>(i)];
    if ((k == RowKind::greater_equal && ym < -tol.feas) || (k == RowKind::less_equal && ym > tol.feas)) {
      return res;
    }
    fixed_min[static_cast<size_t>(i)] = ym;
  }

  // Dual of  min (s c)^T x  s.t. A x ~ b, lb <= x <= ub:
  //   max b^T y + lb^T v - ub^T w   s.t. A^T y + v - w = s c.
  ProgramBuilder dual(Sense::maximize);
  VectorXd target = s * spec.cost;
  double constant = 0.0;
  std::vector<std::vector<std::pair<Index, double>>> cols(static_cast<size_t>(n));
  struct YVar {
    Index pos = -1, neg = -1;
  };
  std::vector<YVar> yv(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const auto ui = static_cast<size_t>(i);
    if (fixed_min[ui]) {
      target -= *fixed_min[ui] * spec.matrix.row(i).transpose();
      constant += *fixed_min[ui] * spec.rhs(i);
      continue;
    }
    const RowKind k = spec.kinds[ui];
    if (k != RowKind::less_equal) yv[ui].pos = dual.add_variable(spec.rhs(i));
    if (k != RowKind::greater_equal) yv[ui].neg = dual.add_variable(-spec.rhs(i));
    for (Index j = 0; j < n; ++j) {
      const double a = spec.matrix(i, j);
      if (a == 0.0) continue;
      if (yv[ui].pos >= 0) cols[static_cast<size_t>(j)].emplace_back(yv[ui].pos, a);
      if (yv[ui].neg >= 0) cols[static_cast<size_t>(j)].emplace_back(yv[ui].neg, -a);
    }
  }
  for (Index j = 0; j < n; ++j) {
    const Index v = dual.add_variable(lb(j));
    cols[static_cast<size_t>(j)].emplace_back(v, 1.0);
    if (std::isfinite(ub(j))) {
      const Index w = dual.add_variable(-ub(j));
      cols[static_cast<size_t>(j)].emplace_back(w, -1.0);
    }
  }
  for (Index j = 0; j < n; ++j) dual.add_row(cols[static_cast<size_t>(j)], RowKind::equal, target(j));

  const SolveOutcome sol = solve_lp(dual.lp(), tol);
  if (sol.status == SolveStatus::infeasible) return res;
  res.feasible = true;
  if (sol.status == SolveStatus::unbounded) {
    res.dual_objective = s * std::numeric_limits<double>::infinity();
    return res;
  }
  const double d_min = sol.objective + constant;
  res.dual_objective = s * d_min;
  res.completed_duals = VectorXd::Zero(m);
  for (Index i = 0; i < m; ++i) {
    const auto ui = static_cast<size_t>(i);
    double ym = 0.0;
    if (fixed_min[ui]) {
      ym = *fixed_min[ui];
    } else {
      if (yv[ui].pos >= 0) ym += sol.primal(yv[ui].pos);
      if (yv[ui].neg >= 0) ym -= sol.primal(yv[ui].neg);
    }
    res.completed_duals(i) = s * ym;
  }
  const double p_min = s * primal_objective;
  res.optimal = std::abs(d_min - p_min) <= tol.cert * (1.0 + std::abs(p_min));
  return res;
}

}  // namespace peakload
