#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {
namespace {

// All constraints as rows g x (kind) h, with bounds appended.
struct Rows {
  MatrixXd g;
  VectorXd h;
  std::vector<peakload::RowKind> kinds;
};

Rows gather(const peakload::LpSpec& spec) {
  const Index n = spec.num_vars();
  const Index m = spec.num_rows();
  const VectorXd lb = spec.lower_bounds();
  const VectorXd ub = spec.upper_bounds();
  std::vector<Index> fin;
  for (Index j = 0; j < n; ++j) {
    if (std::isfinite(ub(j))) fin.push_back(j);
  }
  const Index total = m + n + static_cast<Index>(fin.size());
  Rows r{MatrixXd::Zero(total, n), VectorXd(total), spec.kinds};
  r.g.topRows(m) = spec.matrix;
  r.h.head(m) = spec.rhs;
  for (Index j = 0; j < n; ++j) {
    r.g(m + j, j) = 1.0;
    r.h(m + j) = lb(j);
    r.kinds.push_back(peakload::RowKind::greater_equal);
  }
  for (size_t k = 0; k < fin.size(); ++k) {
    const Index i = m + n + static_cast<Index>(k);
    r.g(i, fin[k]) = 1.0;
    r.h(i) = ub(fin[k]);
    r.kinds.push_back(peakload::RowKind::less_equal);
  }
  return r;
}

bool feasible(const Rows& r, const VectorXd& x, double tol) {
  const VectorXd act = r.g * x;
  for (Index i = 0; i < act.size(); ++i) {
    const double s = act(i) - r.h(i);
    const double t = tol * (1.0 + std::abs(r.h(i)));
    switch (r.kinds[static_cast<size_t>(i)]) {
      case peakload::RowKind::greater_equal: if (s < -t) return false; break;
      case peakload::RowKind::less_equal: if (s > t) return false; break;
      case peakload::RowKind::equal: if (std::abs(s) > t) return false; break;
    }
  }
  return true;
}

template <class F>
void for_each_subset(Index total, Index k, F&& f) {
  std::vector<Index> idx(static_cast<size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  while (true) {
    f(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == total - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

}  // namespace

std::optional<Reference> brute_force_lp(const peakload::LpSpec& spec, double tol) {
  const Rows r = gather(spec);
  const Index n = spec.num_vars();
  const double s = spec.sense == peakload::Sense::minimize ? 1.0 : -1.0;
  std::optional<Reference> best;
  for_each_subset(r.g.rows(), n, [&](const std::vector<Index>& idx) {
    MatrixXd a(n, n);
    VectorXd b(n);
    for (Index i = 0; i < n; ++i) {
      a.row(i) = r.g.row(idx[static_cast<size_t>(i)]);
      b(i) = r.h(idx[static_cast<size_t>(i)]);
    }
    Eigen::FullPivLU<MatrixXd> lu(a);
    if (!lu.isInvertible()) return;
    const VectorXd x = lu.solve(b);
    if (!feasible(r, x, tol)) return;
    const double obj = spec.cost.dot(x);
    if (!best || s * obj < s * best->objective) best = Reference{x, obj};
  });
  return best;
}

std::optional<Reference> active_set_qp(const peakload::QpSpec& spec, double tol) {
  const Rows r = gather(spec);
  const Index n = spec.num_vars();
  const Index total = r.g.rows();
  const double s = spec.sense == peakload::Sense::minimize ? 1.0 : -1.0;
  const MatrixXd q = s * spec.quadratic;
  const VectorXd c = s * spec.cost;
  std::optional<Reference> best;
  double best_min = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total); ++mask) {
    std::vector<Index> act;
    bool ok = true;
    for (Index i = 0; i < total; ++i) {
      const bool in = (mask >> i) & 1U;
      if (r.kinds[static_cast<size_t>(i)] == peakload::RowKind::equal && !in) ok = false;
      if (in) act.push_back(i);
    }
    if (!ok) continue;
    const Index k = static_cast<Index>(act.size());
    // [Q  -G_A^T; G_A 0] [x; y] = [-c; h_A]
    MatrixXd kkt = MatrixXd::Zero(n + k, n + k);
    VectorXd rhs(n + k);
    kkt.topLeftCorner(n, n) = q;
    rhs.head(n) = -c;
    for (Index a = 0; a < k; ++a) {
      kkt.block(0, n + a, n, 1) = -r.g.row(act[static_cast<size_t>(a)]).transpose();
      kkt.block(n + a, 0, 1, n) = r.g.row(act[static_cast<size_t>(a)]);
      rhs(n + a) = r.h(act[static_cast<size_t>(a)]);
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
    const VectorXd sol = cod.solve(rhs);
    if ((kkt * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
    const VectorXd x = sol.head(n);
    if (!feasible(r, x, tol)) continue;
    bool dual_ok = true;
    for (Index a = 0; a < k; ++a) {
      const double y = sol(n + a);
      const auto kind = r.kinds[static_cast<size_t>(act[static_cast<size_t>(a)])];
      if (kind == peakload::RowKind::greater_equal && y < -tol) dual_ok = false;
      if (kind == peakload::RowKind::less_equal && y > tol) dual_ok = false;
    }
    if (!dual_ok) continue;
    const double obj_min = c.dot(x) + 0.5 * x.dot(q * x);
    if (obj_min < best_min) {
      best_min = obj_min;
      best = Reference{x, s * obj_min};
    }
  }
  return best;
}

peakload::LpSpec random_lp(std::mt19937_64& rng, Index n, Index m) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.5, 3.0);
  std::uniform_int_distribution<int> kind(0, 2);
  peakload::LpSpec spec;
  spec.sense = kind(rng) == 0 ? peakload::Sense::maximize : peakload::Sense::minimize;
  spec.cost = VectorXd::NullaryExpr(n, [&] { return coef(rng); });
  spec.matrix = MatrixXd::NullaryExpr(m, n, [&] { return coef(rng); });
  // Rows are generated around a known interior point so most draws are feasible.
  const VectorXd x0 = VectorXd::NullaryExpr(n, [&] { return pos(rng) * 0.5; });
  const VectorXd act = spec.matrix * x0;
  spec.rhs.resize(m);
  for (Index i = 0; i < m; ++i) {
    const int k = kind(rng);
    if (k == 0) {
      spec.kinds.push_back(peakload::RowKind::less_equal);
      spec.rhs(i) = act(i) + pos(rng);
    } else if (k == 1) {
      spec.kinds.push_back(peakload::RowKind::greater_equal);
      spec.rhs(i) = act(i) - pos(rng);
    } else {
      spec.kinds.push_back(peakload::RowKind::equal);
      spec.rhs(i) = act(i);
    }
  }
  spec.upper = VectorXd::NullaryExpr(n, [&] { return 2.0 + pos(rng); });
  return spec;
}

}  // namespace oracle

namespace oracle {

double grid_maximin_tau_2d(const MatrixXd& p, const VectorXd& r, double step) {
  const int steps = static_cast<int>(std::lround(1.0 / step));
  double best = -1.0;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const VectorXd u = (VectorXd(2) << i * step, j * step).finished();
      if (((p * u - r).array() > 1e-12).any()) continue;
      best = std::max(best, std::min(u(0), u(1)));
    }
  }
  return best;
}

// Points of `pts` that are not convex combinations of the others.
std::vector<VectorXd> extreme_points(const std::vector<VectorXd>& pts) {
  using namespace peakload;
  std::vector<VectorXd> out;
  for (size_t j = 0; j < pts.size(); ++j) {
    ProgramBuilder b(Sense::minimize);
    std::vector<Index> vars;
    for (size_t k = 0; k < pts.size(); ++k) {
      if (k != j && (pts[k] - pts[j]).cwiseAbs().maxCoeff() > 1e-12) vars.push_back(b.add_variable(0.0));
      else vars.push_back(-1);
    }
    std::vector<std::pair<Index, double>> sum;
    for (Index v : vars) {
      if (v >= 0) sum.emplace_back(v, 1.0);
    }
    if (sum.empty()) {
      out.push_back(pts[j]);
      continue;
    }
    b.add_row(sum, RowKind::equal, 1.0);
    for (Index c = 0; c < pts[j].size(); ++c) {
      std::vector<std::pair<Index, double>> row;
      for (size_t k = 0; k < pts.size(); ++k) {
        if (vars[k] >= 0) row.emplace_back(vars[k], pts[k](c));
      }
      b.add_row(row, RowKind::equal, pts[j](c));
    }
    const bool duplicate = std::any_of(out.begin(), out.end(),
                                       [&](const VectorXd& o) { return (o - pts[j]).cwiseAbs().maxCoeff() <= 1e-12; });
    if (solve_lp(b.lp()).status == SolveStatus::infeasible && !duplicate) out.push_back(pts[j]);
  }
  return out;
}

}  // namespace oracle
