#include "peakload/errors.hpp"
#include "peakload/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace peakload {
namespace {

constexpr double kVertexTol = 1e-9;
constexpr double kSnap = 1e-12;

void for_each_subset(Index total, Index k, const std::function<void(const std::vector<Index>&)>& f) {
  if (k > total) return;
  std::vector<Index> idx(static_cast<size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  for (;;) {
    f(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == total - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

bool lex_less(const VectorXd& a, const VectorXd& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i) - b(i)) > kVertexTol) return a(i) < b(i);
  }
  return false;
}

void snap(VectorXd& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) < kSnap) v(i) = 0.0;
  }
}

LpSpec region_lp(const Polytope& u, Sense sense, const VectorXd& cost) {
  LpSpec spec;
  spec.sense = sense;
  spec.cost = cost;
  spec.matrix = u.P;
  spec.rhs = u.r;
  spec.kinds.assign(static_cast<size_t>(u.num_rows()), RowKind::less_equal);
  return spec;
}

}  // namespace

Polytope::Polytope(MatrixXd p, VectorXd rhs) : P(std::move(p)), r(std::move(rhs)) {
  if (P.rows() != r.size()) throw Error(ErrorCode::invalid_input, "polytope P rows must match r length");
  if (!P.allFinite() || !r.allFinite()) throw Error(ErrorCode::invalid_input, "polytope data must be finite");
}

bool Polytope::contains(const VectorXd& u, double tol) const {
  if (u.size() != dim()) return false;
  if ((u.array() < -tol).any()) return false;
  if (num_rows() == 0) return true;
  const VectorXd slack = P * u - r;
  for (Index i = 0; i < slack.size(); ++i) {
    if (slack(i) > tol * (1.0 + std::abs(r(i)))) return false;
  }
  return true;
}

Polytope Polytope::box(Index n) { return Polytope(MatrixXd::Identity(n, n), VectorXd::Ones(n)); }

Polytope Polytope::simplex(Index n) { return Polytope(MatrixXd::Ones(1, n), VectorXd::Ones(1)); }

TauResult tau(const Polytope& u) {
  const Index n = u.dim();
  // Variables (u, t): max t  s.t.  t - u_i <= 0,  P u <= r.
  ProgramBuilder b(Sense::maximize);
  for (Index i = 0; i < n; ++i) b.add_variable(0.0);
  const Index t = b.add_variable(1.0);
  for (Index i = 0; i < n; ++i) b.add_row({{t, 1.0}, {i, -1.0}}, RowKind::less_equal, 0.0);
  for (Index k = 0; k < u.num_rows(); ++k) {
    std::vector<std::pair<Index, double>> row;
    for (Index i = 0; i < n; ++i) {
      if (u.P(k, i) != 0.0) row.emplace_back(i, u.P(k, i));
    }
    b.add_row(row, RowKind::less_equal, u.r(k));
  }
  const SolveOutcome out = solve_lp(b.lp());
  if (out.status == SolveStatus::infeasible) throw Error(ErrorCode::empty_set, "uncertainty set is empty");
  if (out.status == SolveStatus::unbounded) throw Error(ErrorCode::unbounded_set, "uncertainty set is unbounded");
  TauResult res;
  res.tau = out.primal(t);
  res.witness = out.primal.head(n);
  snap(res.witness);
  return res;
}

LinearMax maximize_linear(const Polytope& u, const VectorXd& w) {
  if (w.size() != u.dim()) throw Error(ErrorCode::invalid_input, "objective length does not match set dimension");
  const SolveOutcome out = solve_lp(region_lp(u, Sense::maximize, w));
  if (out.status == SolveStatus::infeasible) throw Error(ErrorCode::empty_set, "uncertainty set is empty");
  if (out.status == SolveStatus::unbounded) throw Error(ErrorCode::unbounded_set, "linear objective unbounded over set");
  return {out.objective, out.primal};
}

std::vector<VectorXd> enumerate_vertices(const Polytope& u) {
  const Index n = u.dim();
  if (n > kMaxEnumerationDim) {
    throw Error(ErrorCode::dimension_too_large,
                "vertex enumeration supports at most " + std::to_string(kMaxEnumerationDim) + " coordinates, got " +
                    std::to_string(n));
  }
  const Index m = u.num_rows();
  // Rows 0..m-1 are P u <= r, rows m..m+n-1 are -u_i <= 0.
  MatrixXd g(m + n, n);
  VectorXd h(m + n);
  g.topRows(m) = u.P;
  h.head(m) = u.r;
  g.bottomRows(n) = -MatrixXd::Identity(n, n);
  h.tail(n).setZero();

  std::vector<VectorXd> out;
  MatrixXd a(n, n);
  VectorXd rhs(n);
  for_each_subset(m + n, n, [&](const std::vector<Index>& idx) {
    for (Index i = 0; i < n; ++i) {
      a.row(i) = g.row(idx[static_cast<size_t>(i)]);
      rhs(i) = h(idx[static_cast<size_t>(i)]);
    }
    Eigen::FullPivLU<MatrixXd> lu(a);
    if (!lu.isInvertible()) return;
    VectorXd v = lu.solve(rhs);
    snap(v);
    if (!u.contains(v, kVertexTol)) return;
    for (const auto& w : out) {
      if ((w - v).cwiseAbs().maxCoeff() <= kVertexTol) return;
    }
    out.push_back(v);
  });
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

ValidationReport validate(const Polytope& u) {
  const Index n = u.dim();
  ValidationReport rep;
  rep.axis_maxima = VectorXd::Zero(n);
  rep.contains_zero = u.num_rows() == 0 || (u.r.array() >= -kVertexTol).all();
  if (!rep.contains_zero) rep.warnings.push_back("set does not contain the origin");

  rep.nonempty = true;
  rep.bounded = true;
  for (Index i = 0; i < n; ++i) {
    const SolveOutcome out = solve_lp(region_lp(u, Sense::maximize, VectorXd::Unit(n, i)));
    if (out.status == SolveStatus::infeasible) {
      rep.nonempty = false;
      rep.axis_maxima(i) = std::numeric_limits<double>::quiet_NaN();
    } else if (out.status == SolveStatus::unbounded) {
      rep.bounded = false;
      rep.axis_maxima(i) = std::numeric_limits<double>::infinity();
    } else {
      rep.axis_maxima(i) = out.objective;
    }
  }
  if (n == 0) {
    rep.nonempty = rep.contains_zero;
  }
  if (!rep.nonempty) {
    rep.warnings.push_back("set is empty");
    rep.inside_unit_box = false;
    return rep;
  }
  if (!rep.bounded) rep.warnings.push_back("set is unbounded");

  rep.inside_unit_box = rep.bounded && (rep.axis_maxima.array() <= 1.0 + kVertexTol).all();
  if (rep.bounded && !rep.inside_unit_box) rep.warnings.push_back("set leaves the unit box");
  bool full_axes = rep.bounded;
  for (Index i = 0; i < n && full_axes; ++i) full_axes = std::abs(rep.axis_maxima(i) - 1.0) <= kVertexTol;
  if (rep.bounded && rep.inside_unit_box && !full_axes) {
    rep.warnings.push_back("some axis projection is shorter than [0,1]");
  }
  rep.is_valid_uncertainty_set = rep.contains_zero && rep.inside_unit_box && full_axes;
  return rep;
}

Polytope lift_product(const Polytope& uprime, Index periods) {
  if (periods < 1) throw Error(ErrorCode::invalid_input, "period count must be at least 1");
  const Index n = uprime.dim();
  const Index m = uprime.num_rows();
  MatrixXd p = MatrixXd::Zero(m * periods, n * periods);
  VectorXd r(m * periods);
  for (Index t = 0; t < periods; ++t) {
    p.block(t * m, t * n, m, n) = uprime.P;
    r.segment(t * m, m) = uprime.r;
  }
  return Polytope(std::move(p), std::move(r));
}

Polytope hull_to_polytope(const std::vector<VectorXd>& points) {
  if (points.empty()) throw Error(ErrorCode::invalid_input, "hull of an empty point list");
  const Index n = points.front().size();
  const Index k = static_cast<Index>(points.size());
  for (const auto& p : points) {
    if (p.size() != n) throw Error(ErrorCode::invalid_input, "hull points differ in dimension");
    if (!p.allFinite()) throw Error(ErrorCode::invalid_input, "hull points must be finite");
    if ((p.array() < -kVertexTol).any()) throw Error(ErrorCode::invalid_input, "hull points must be nonnegative");
  }
  if (n > 3 && k > 12) {
    throw Error(ErrorCode::dimension_too_large, "facet search supports dimension <= 3 or at most 12 points");
  }

  MatrixXd pts(k, n);
  for (Index i = 0; i < k; ++i) pts.row(i) = points[static_cast<size_t>(i)].transpose();
  const double scale = 1.0 + pts.cwiseAbs().maxCoeff();

  // Affine hull: basis B (n x d) around center c, complement N.
  VectorXd center = pts.colwise().mean().transpose();
  MatrixXd basis;
  MatrixXd complement;
  {
    const MatrixXd centered = pts.rowwise() - center.transpose();
    Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    Index d = 0;
    for (Index i = 0; i < sv.size(); ++i) d += sv(i) > 1e-9 * scale ? 1 : 0;
    if (d == n) {
      basis = MatrixXd::Identity(n, n);
      center = VectorXd::Zero(n);
    } else {
      basis = svd.matrixV().leftCols(d);
      complement = svd.matrixV().rightCols(n - d);
    }
  }
  const Index d = basis.cols();

  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  auto push = [&](VectorXd a, double b) {
    const double mx = a.cwiseAbs().maxCoeff();
    if (mx <= 1e-12) return;
    a /= mx;
    b /= mx;
    for (Index i = 0; i < a.size(); ++i) {
      if (std::abs(a(i)) < 1e-12) a(i) = 0.0;
      if (std::abs(a(i) - std::round(a(i))) < 1e-12) a(i) = std::round(a(i));
    }
    if (std::abs(b) < 1e-12) b = 0.0;
    if (std::abs(b - std::round(b)) < 1e-12) b = std::round(b);
    // -u_i <= 0 is implied by the nonnegativity of the representation.
    if (b == 0.0 && (a.array() <= 0.0).all() && (a.array() < 0.0).count() == 1) return;
    for (size_t i = 0; i < rows.size(); ++i) {
      if ((rows[i] - a).cwiseAbs().maxCoeff() <= 1e-9 && std::abs(rhs[i] - b) <= 1e-9) return;
    }
    rows.push_back(std::move(a));
    rhs.push_back(b);
  };

  for (Index j = 0; j < complement.cols(); ++j) {
    const VectorXd a = complement.col(j);
    const double b = a.dot(center);
    push(a, b);
    push(-a, -b);
  }

  MatrixXd z(k, d);
  for (Index i = 0; i < k; ++i) z.row(i) = (basis.transpose() * (pts.row(i).transpose() - center)).transpose();

  if (d == 1) {
    const double lo = z.col(0).minCoeff();
    const double hi = z.col(0).maxCoeff();
    const VectorXd a = basis.col(0);
    push(a, hi + a.dot(center));
    push(-a, -lo - a.dot(center));
  } else if (d > 1) {
    MatrixXd sys(d, d + 1);
    for_each_subset(k, d, [&](const std::vector<Index>& idx) {
      for (Index i = 0; i < d; ++i) {
        sys.row(i).head(d) = z.row(idx[static_cast<size_t>(i)]);
        sys(i, d) = -1.0;
      }
      Eigen::FullPivLU<MatrixXd> lu(sys);
      lu.setThreshold(1e-10);
      const MatrixXd ker = lu.kernel();
      if (ker.cols() != 1) return;
      VectorXd a = ker.col(0).head(d);
      double b = ker(d, 0);
      if (a.norm() <= 1e-12) return;
      const double norm = a.norm();
      a /= norm;
      b /= norm;
      const VectorXd vals = z * a;
      const double tol = 1e-9 * scale;
      const bool below = (vals.array() <= b + tol).all();
      const bool above = (vals.array() >= b - tol).all();
      if (below == above) return;
      if (above) {
        a = -a;
        b = -b;
      }
      const VectorXd full = basis * a;
      push(full, b + full.dot(center));
    });
  }

  MatrixXd p(static_cast<Index>(rows.size()), n);
  VectorXd r(static_cast<Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    p.row(static_cast<Index>(i)) = rows[i].transpose();
    r(static_cast<Index>(i)) = rhs[i];
  }
  return Polytope(std::move(p), std::move(r));
}

bool same_point_set(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b, double tol) {
  auto covered = [tol](const std::vector<VectorXd>& x, const std::vector<VectorXd>& y) {
    for (const auto& p : x) {
      bool found = false;
      for (const auto& q : y) {
        if (p.size() == q.size() && (p - q).cwiseAbs().maxCoeff() <= tol) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

}  // namespace peakload
