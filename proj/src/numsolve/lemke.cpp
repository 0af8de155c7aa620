#include "peakload/errors.hpp"
#include "peakload/numsolve.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace peakload {
namespace {

constexpr double kLemkePivotTol = 1e-11;
constexpr double kTieTol = 1e-11;

struct LcpResult {
  bool solved = false;
  VectorXd z;
  int iterations = 0;
};

// Lemke's method for w = M z + q, w, z >= 0, w'z = 0 with covering vector e.
// Column layout of the tableau: w (p), z (p), z0, rhs. The w block of the
// current tableau holds B^{-1}, which drives the lexicographic ratio test.
LcpResult lemke(const MatrixXd& m, const VectorXd& q, double zero_pivot) {
  const Index p = q.size();
  LcpResult res;
  res.z = VectorXd::Zero(p);
  if (p == 0 || q.minCoeff() >= 0.0) {
    res.solved = true;
    return res;
  }

  const Index z0 = 2 * p;
  const Index rhs = 2 * p + 1;
  MatrixXd t = MatrixXd::Zero(p, 2 * p + 2);
  t.leftCols(p).setIdentity();
  t.middleCols(p, p) = -m;
  t.col(z0).setConstant(-1.0);
  t.col(rhs) = q;
  std::vector<Index> basis(static_cast<size_t>(p));
  for (Index i = 0; i < p; ++i) basis[static_cast<size_t>(i)] = i;

  auto do_pivot = [&](Index r, Index c) {
    t.row(r) /= t(r, c);
    for (Index i = 0; i < p; ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    t(r, c) = 1.0;
    basis[static_cast<size_t>(r)] = c;
  };

  // Initial pivot: z0 enters at the most negative q_i (ties to the largest
  // index, the lexicographic choice when B^{-1} = I).
  Index r0 = 0;
  for (Index i = 1; i < p; ++i) {
    if (q(i) <= q(r0)) r0 = i;
  }
  Index leaving = basis[static_cast<size_t>(r0)];
  do_pivot(r0, z0);

  // Lexicographic comparison of rows i and k scaled by their pivot entries.
  auto lex_less = [&](Index i, double ai, Index k, double ak) {
    double a = t(i, rhs) / ai;
    double b = t(k, rhs) / ak;
    if (std::abs(a - b) > kTieTol * (1.0 + std::max(std::abs(a), std::abs(b)))) return a < b;
    for (Index j = 0; j < p; ++j) {
      a = t(i, j) / ai;
      b = t(k, j) / ak;
      if (std::abs(a - b) > kTieTol * (1.0 + std::max(std::abs(a), std::abs(b)))) return a < b;
    }
    return i < k;
  };

  const int max_iter = static_cast<int>(50 * p + 1000);
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    const Index enter = leaving < p ? leaving + p : leaving - p;
    Index r = -1;
    double ar = 0.0;
    for (Index i = 0; i < p; ++i) {
      const double a = t(i, enter);
      if (a <= kLemkePivotTol) continue;
      if (r < 0 || lex_less(i, a, r, ar)) {
        r = i;
        ar = a;
      }
    }
    if (r < 0) return res;  // secondary ray
    if (std::abs(ar) < zero_pivot) {
      throw Error(ErrorCode::numeric_breakdown, "Lemke pivot below zero-pivot threshold");
    }
    // z0 leaves as soon as it ties for the minimum ratio.
    for (Index i = 0; i < p; ++i) {
      if (basis[static_cast<size_t>(i)] != z0 || i == r) continue;
      const double a = t(i, enter);
      if (a <= kLemkePivotTol) break;
      const double ri = t(i, rhs) / a;
      const double rr = t(r, rhs) / ar;
      if (std::abs(ri - rr) <= kTieTol * (1.0 + std::abs(rr))) {
        r = i;
        ar = a;
      }
      break;
    }
    leaving = basis[static_cast<size_t>(r)];
    do_pivot(r, enter);
    if (leaving == z0) {
      // Refactor the complementary basis for accurate values.
      MatrixXd full(p, 2 * p + 1);
      full.leftCols(p).setIdentity();
      full.middleCols(p, p) = -m;
      full.col(z0).setConstant(-1.0);
      MatrixXd bmat(p, p);
      for (Index i = 0; i < p; ++i) bmat.col(i) = full.col(basis[static_cast<size_t>(i)]);
      Eigen::FullPivLU<MatrixXd> lu(bmat);
      VectorXd v;
      if (lu.isInvertible()) {
        v = lu.solve(q);
      } else {
        v = t.col(rhs);
      }
      for (Index i = 0; i < p; ++i) {
        const Index b = basis[static_cast<size_t>(i)];
        if (b >= p && b < 2 * p) res.z(b - p) = std::max(v(i), 0.0);
      }
      res.solved = true;
      return res;
    }
  }
  throw Error(ErrorCode::numeric_breakdown, "Lemke iteration limit exceeded");
}

struct GeRow {
  Index source;  // original row, or -1 - j for the upper bound of variable j
  double sign;   // row stated as sign * (a x) >= sign * b
};

}  // namespace

SolveOutcome solve_qp(const QpSpec& spec, const Tolerances& tol) {
  spec.check();
  const Index n = spec.num_vars();
  const Index m = spec.num_rows();
  const double sense = spec.sense == Sense::minimize ? 1.0 : -1.0;
  const MatrixXd qmat = spec.quadratic.size() ? MatrixXd(sense * spec.quadratic) : MatrixXd::Zero(n, n);
  const VectorXd c = sense * spec.cost;

  if (n > 0 && qmat.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(qmat, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-9) {
      throw Error(ErrorCode::not_convex, "objective is not convex in its stated sense");
    }
  }

  const VectorXd lb = spec.lower_bounds();
  const VectorXd ub = spec.upper_bounds();
  SolveOutcome out;
  for (Index j = 0; j < n; ++j) {
    if (ub(j) < lb(j) - tol.feas) {
      out.status = SolveStatus::infeasible;
      return out;
    }
  }

  std::vector<GeRow> ge;
  for (Index i = 0; i < m; ++i) {
    switch (spec.kinds[static_cast<size_t>(i)]) {
      case RowKind::greater_equal: ge.push_back({i, 1.0}); break;
      case RowKind::less_equal: ge.push_back({i, -1.0}); break;
      case RowKind::equal:
        ge.push_back({i, 1.0});
        ge.push_back({i, -1.0});
        break;
    }
  }
  for (Index j = 0; j < n; ++j) {
    if (std::isfinite(ub(j))) ge.push_back({-1 - j, -1.0});
  }
  const Index mg = static_cast<Index>(ge.size());
  MatrixXd g = MatrixXd::Zero(mg, n);
  VectorXd h(mg);
  for (Index k = 0; k < mg; ++k) {
    const GeRow& row = ge[static_cast<size_t>(k)];
    if (row.source >= 0) {
      g.row(k) = row.sign * spec.matrix.row(row.source);
      h(k) = row.sign * spec.rhs(row.source);
    } else {
      const Index j = -1 - row.source;
      g(k, j) = -1.0;
      h(k) = -ub(j);
    }
  }
  // Shift x = lb + s, s >= 0.
  const VectorXd hs = h - g * lb;
  const VectorXd cs = c + qmat * lb;

  const Index p = n + mg;
  MatrixXd lcp = MatrixXd::Zero(p, p);
  lcp.topLeftCorner(n, n) = qmat;
  lcp.topRightCorner(n, mg) = -g.transpose();
  lcp.bottomLeftCorner(mg, n) = g;
  VectorXd qv(p);
  qv.head(n) = cs;
  qv.tail(mg) = -hs;

  LcpResult lcp_res = lemke(lcp, qv, tol.zero_pivot);
  out.iterations = lcp_res.iterations;
  if (!lcp_res.solved) {
    // No complementary solution: either the constraints are empty or the
    // objective is unbounded over them.
    LpSpec feas = spec;
    feas.sense = Sense::minimize;
    feas.cost = VectorXd::Zero(n);
    SolveOutcome f = solve_lp(feas, tol);
    out.status = f.optimal() ? SolveStatus::unbounded : SolveStatus::infeasible;
    return out;
  }

  out.status = SolveStatus::optimal;
  out.primal = lb + lcp_res.z.head(n);
  out.duals = VectorXd::Zero(m);
  for (Index k = 0; k < mg; ++k) {
    const GeRow& row = ge[static_cast<size_t>(k)];
    if (row.source >= 0) out.duals(row.source) += sense * row.sign * lcp_res.z(n + k);
  }
  const MatrixXd qstated = spec.quadratic.size() ? spec.quadratic : MatrixXd::Zero(n, n);
  out.objective = spec.cost.dot(out.primal) + 0.5 * out.primal.dot(qstated * out.primal);
  out.reduced_costs = spec.cost + qstated * out.primal - spec.matrix.transpose() * out.duals;
  const VectorXd act = spec.matrix * out.primal;
  for (Index i = 0; i < m; ++i) {
    if (spec.kinds[static_cast<size_t>(i)] == RowKind::equal ||
        std::abs(act(i) - spec.rhs(i)) <= tol.feas * (1.0 + std::abs(spec.rhs(i)))) {
      out.active_set.push_back(i);
    }
  }
  out.certificate = certify(spec, out, tol);
  return out;
}

}  // namespace peakload
