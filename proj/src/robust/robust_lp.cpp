#include "peakload/errors.hpp"
#include "peakload/robust.hpp"

#include <cmath>
#include <string>

namespace peakload {

void RobustLp::check() const {
  const Index n = c.size();
  const Index k = d.size();
  const Index m = b.size();
  if (A.rows() != m || A.cols() != n) throw Error(ErrorCode::invalid_input, "A must be m x n");
  if (B.rows() != m || B.cols() != k) throw Error(ErrorCode::invalid_input, "B must be m x k");
  if (lambda.size() != n) throw Error(ErrorCode::invalid_input, "lambda must have one entry per x variable");
  if (U.dim() != n) throw Error(ErrorCode::invalid_input, "uncertainty set dimension must equal x dimension");
  if ((c.array() < 0.0).any() || (d.array() < 0.0).any() || (lambda.array() < 0.0).any()) {
    throw Error(ErrorCode::invalid_input, "c, d and lambda must be nonnegative");
  }
}

RobustReport solve_robust_lp(const RobustLp& p, const Tolerances& tol) {
  p.check();
  const Index n = p.c.size();
  const Index k = p.d.size();
  const Index m = p.b.size();
  const Index mp = p.U.num_rows();

  // Dualized adversary: variables (x, y, z), rows A x + B y >= b and
  // P^T z - diag(lambda) x >= 0.
  LpSpec rob;
  rob.sense = Sense::minimize;
  rob.cost.resize(n + k + mp);
  rob.cost << p.c, p.d, p.U.r;
  rob.matrix = MatrixXd::Zero(m + n, n + k + mp);
  rob.matrix.block(0, 0, m, n) = p.A;
  rob.matrix.block(0, n, m, k) = p.B;
  rob.matrix.block(m, 0, n, n) = -MatrixXd(p.lambda.asDiagonal());
  rob.matrix.block(m, n + k, n, mp) = p.U.P.transpose();
  rob.rhs = VectorXd::Zero(m + n);
  rob.rhs.head(m) = p.b;
  rob.kinds.assign(static_cast<size_t>(m + n), RowKind::greater_equal);
  const SolveOutcome r = solve_lp(rob, tol);
  if (!r.optimal()) throw StatusError(r.status, "robust LP");

  RobustReport rep;
  rep.val_R = r.objective;
  rep.x_R = r.primal.head(n);
  rep.y_R = r.primal.segment(n, k);

  const auto nominal_plus_worst = [&](const VectorXd& x, const VectorXd& y, const VectorXd& u) {
    return p.c.dot(x) + p.d.dot(y) + p.lambda.cwiseProduct(u).dot(x);
  };
  const VectorXd u_dual = r.duals.segment(m, n);
  if (p.U.contains(u_dual, 1e-7) &&
      std::abs(nominal_plus_worst(rep.x_R, rep.y_R, u_dual) - rep.val_R) <= tol.cert * (1.0 + std::abs(rep.val_R))) {
    rep.worst_u = u_dual;
    rep.worst_u_from_duals = true;
  } else {
    rep.worst_u = maximize_linear(p.U, p.lambda.cwiseProduct(rep.x_R)).argmax;
  }

  LpSpec box;
  box.sense = Sense::minimize;
  box.cost.resize(n + k);
  box.cost << p.c + p.lambda, p.d;
  box.matrix.resize(m, n + k);
  box.matrix << p.A, p.B;
  box.rhs = p.b;
  box.kinds.assign(static_cast<size_t>(m), RowKind::greater_equal);
  const SolveOutcome bx = solve_lp(box, tol);
  if (!bx.optimal()) throw StatusError(bx.status, "box LP");
  rep.val_Btilde = bx.objective;
  rep.x_B = bx.primal.head(n);
  rep.y_B = bx.primal.tail(k);
  rep.val_B = p.c.dot(rep.x_B) + p.d.dot(rep.y_B) + maximize_linear(p.U, p.lambda.cwiseProduct(rep.x_B)).value;

  rep.tau = tau(p.U).tau;
  const double slack = 1e-7;
  rep.chain_ok = rep.val_R <= rep.val_B + slack && rep.val_B <= rep.val_Btilde + slack;
  rep.bound_ok = rep.val_B <= rep.val_R / rep.tau + slack;
  return rep;
}

}  // namespace peakload
