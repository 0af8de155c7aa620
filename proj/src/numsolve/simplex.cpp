#include "peakload/errors.hpp"
#include "peakload/numsolve.hpp"

#include <algorithm>
#include <cmath>

namespace peakload {
namespace {

constexpr double kPivotTol = 1e-9;    // smallest admissible ratio-test entry
constexpr double kEnterTol = 1e-10;   // reduced cost threshold for entering
constexpr int kMaxIterations = 200000;

// Equality standard form  A_std z = b_std, z >= 0, b_std >= 0, where
// z = (x - lb, slacks, artificials). Rows are the original rows followed by
// one row per finite upper bound.
struct StandardForm {
  MatrixXd a;
  VectorXd b;
  VectorXd cost;  // minimization costs over all columns
  Index num_x = 0;
  Index num_slack = 0;
  Index first_art = 0;
  std::vector<double> row_sign;
  std::vector<Index> basis;
};

StandardForm build_standard_form(const LpSpec& spec, const VectorXd& lb, const VectorXd& ub) {
  const Index n = spec.num_vars();
  const Index m = spec.num_rows();
  std::vector<Index> ub_vars;
  for (Index j = 0; j < n; ++j) {
    if (std::isfinite(ub(j))) ub_vars.push_back(j);
  }
  const Index rows = m + static_cast<Index>(ub_vars.size());

  MatrixXd a = MatrixXd::Zero(rows, n);
  VectorXd b(rows);
  std::vector<RowKind> kinds(static_cast<size_t>(rows));
  a.topRows(m) = spec.matrix;
  b.head(m) = spec.rhs - spec.matrix * lb;
  for (Index i = 0; i < m; ++i) kinds[static_cast<size_t>(i)] = spec.kinds[static_cast<size_t>(i)];
  for (size_t k = 0; k < ub_vars.size(); ++k) {
    const Index i = m + static_cast<Index>(k);
    a(i, ub_vars[k]) = 1.0;
    b(i) = ub(ub_vars[k]) - lb(ub_vars[k]);
    kinds[static_cast<size_t>(i)] = RowKind::less_equal;
  }

  Index num_slack = 0;
  for (auto k : kinds) num_slack += (k != RowKind::equal) ? 1 : 0;

  StandardForm sf;
  sf.num_x = n;
  sf.num_slack = num_slack;
  sf.row_sign.assign(static_cast<size_t>(rows), 1.0);
  sf.basis.assign(static_cast<size_t>(rows), -1);

  // Decide flips and which rows need an artificial column.
  std::vector<double> slack_coef(static_cast<size_t>(rows), 0.0);
  std::vector<Index> slack_col(static_cast<size_t>(rows), -1);
  Index next_slack = n;
  Index num_art = 0;
  for (Index i = 0; i < rows; ++i) {
    const auto ui = static_cast<size_t>(i);
    if (b(i) < 0) sf.row_sign[ui] = -1.0;
    if (kinds[ui] != RowKind::equal) {
      slack_col[ui] = next_slack++;
      slack_coef[ui] = (kinds[ui] == RowKind::less_equal ? 1.0 : -1.0) * sf.row_sign[ui];
    }
    if (slack_coef[ui] <= 0.0) ++num_art;
  }
  sf.first_art = n + num_slack;
  const Index cols = sf.first_art + num_art;
  sf.a = MatrixXd::Zero(rows, cols);
  sf.b = VectorXd(rows);
  Index next_art = sf.first_art;
  for (Index i = 0; i < rows; ++i) {
    const auto ui = static_cast<size_t>(i);
    sf.a.row(i).head(n) = sf.row_sign[ui] * a.row(i);
    sf.b(i) = sf.row_sign[ui] * b(i);
    if (slack_col[ui] >= 0) sf.a(i, slack_col[ui]) = slack_coef[ui];
    if (slack_coef[ui] > 0.0) {
      sf.basis[ui] = slack_col[ui];
    } else {
      sf.a(i, next_art) = 1.0;
      sf.basis[ui] = next_art++;
    }
  }
  sf.cost = VectorXd::Zero(cols);
  const double sign = spec.sense == Sense::minimize ? 1.0 : -1.0;
  sf.cost.head(n) = sign * spec.cost;
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf) : rows_(sf.a.rows()), cols_(sf.a.cols()), t_(rows_ + 1, cols_ + 1) {
    t_.setZero();
    t_.topLeftCorner(rows_, cols_) = sf.a;
    t_.col(cols_).head(rows_) = sf.b;
  }

  void set_objective(const VectorXd& cost, const std::vector<Index>& basis) {
    t_.row(rows_).head(cols_) = cost.transpose();
    t_(rows_, cols_) = 0.0;
    for (Index i = 0; i < rows_; ++i) {
      const double cb = cost(basis[static_cast<size_t>(i)]);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(i);
    }
  }

  void pivot(Index r, Index c) {
    const double p = t_(r, c);
    t_.row(r) /= p;
    for (Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, c) = 1.0;
  }

  double reduced_cost(Index j) const { return t_(rows_, j); }
  double objective_value() const { return -t_(rows_, cols_); }
  double entry(Index i, Index j) const { return t_(i, j); }
  double rhs(Index i) const { return t_(i, cols_); }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

 private:
  Index rows_, cols_;
  MatrixXd t_;
};

enum class PhaseResult { optimal, unbounded };

// Bland's rule: lowest-index improving column, ratio ties broken by the
// lowest basic index. Terminates without cycling.
PhaseResult run_simplex(Tableau& tab, std::vector<Index>& basis, Index allowed_cols, int& iterations) {
  for (;;) {
    Index enter = -1;
    for (Index j = 0; j < allowed_cols; ++j) {
      if (tab.reduced_cost(j) < -kEnterTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return PhaseResult::optimal;

    Index leave = -1;
    double best = 0.0;
    for (Index i = 0; i < tab.rows(); ++i) {
      const double a = tab.entry(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(tab.rhs(i), 0.0) / a;
      if (leave < 0 || ratio < best - 1e-12 * (1.0 + std::abs(best)) ||
          (std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best)) &&
           basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return PhaseResult::unbounded;
    tab.pivot(leave, enter);
    basis[static_cast<size_t>(leave)] = enter;
    if (++iterations > kMaxIterations) {
      throw Error(ErrorCode::numeric_breakdown, "simplex iteration limit exceeded");
    }
  }
}

}  // namespace

SolveOutcome solve_lp(const LpSpec& spec, const Tolerances& tol) {
  spec.check();
  const Index n = spec.num_vars();
  const Index m = spec.num_rows();
  const VectorXd lb = spec.lower_bounds();
  const VectorXd ub = spec.upper_bounds();

  SolveOutcome out;
  for (Index j = 0; j < n; ++j) {
    if (ub(j) < lb(j) - tol.feas) {
      out.status = SolveStatus::infeasible;
      return out;
    }
  }

  StandardForm sf = build_standard_form(spec, lb, ub);
  Tableau tab(sf);
  std::vector<Index> basis = sf.basis;
  const Index rows = sf.a.rows();

  // Phase 1.
  if (sf.first_art < sf.a.cols()) {
    VectorXd art_cost = VectorXd::Zero(sf.a.cols());
    art_cost.tail(sf.a.cols() - sf.first_art).setOnes();
    tab.set_objective(art_cost, basis);
    run_simplex(tab, basis, sf.a.cols(), out.iterations);
    const double scale = 1.0 + (sf.b.size() ? sf.b.cwiseAbs().maxCoeff() : 0.0);
    if (tab.objective_value() > tol.feas * scale) {
      out.status = SolveStatus::infeasible;
      return out;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial.
    for (Index i = 0; i < rows; ++i) {
      if (basis[static_cast<size_t>(i)] < sf.first_art) continue;
      for (Index j = 0; j < sf.first_art; ++j) {
        if (std::abs(tab.entry(i, j)) > kPivotTol) {
          tab.pivot(i, j);
          basis[static_cast<size_t>(i)] = j;
          break;
        }
      }
    }
  }

  // Phase 2 over structural and slack columns only.
  tab.set_objective(sf.cost, basis);
  if (run_simplex(tab, basis, sf.first_art, out.iterations) == PhaseResult::unbounded) {
    out.status = SolveStatus::unbounded;
    return out;
  }

  // Refactor the optimal basis.
  VectorXd z = VectorXd::Zero(sf.a.cols());
  VectorXd y_std = VectorXd::Zero(rows);
  if (rows > 0) {
    MatrixXd bmat(rows, rows);
    VectorXd cb(rows);
    for (Index i = 0; i < rows; ++i) {
      bmat.col(i) = sf.a.col(basis[static_cast<size_t>(i)]);
      cb(i) = sf.cost(basis[static_cast<size_t>(i)]);
    }
    Eigen::FullPivLU<MatrixXd> lu(bmat);
    lu.setThreshold(tol.zero_pivot);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::numeric_breakdown, "optimal basis is numerically singular");
    }
    const VectorXd xb = lu.solve(sf.b);
    Eigen::FullPivLU<MatrixXd> lut(bmat.transpose());
    y_std = lut.solve(cb);
    for (Index i = 0; i < rows; ++i) z(basis[static_cast<size_t>(i)]) = std::max(xb(i), 0.0);
  }

  const double sign = spec.sense == Sense::minimize ? 1.0 : -1.0;
  out.status = SolveStatus::optimal;
  out.primal = lb + z.head(n);
  out.objective = spec.cost.dot(out.primal);
  out.duals = VectorXd(m);
  for (Index i = 0; i < m; ++i) out.duals(i) = sign * sf.row_sign[static_cast<size_t>(i)] * y_std(i);
  out.reduced_costs = spec.cost - spec.matrix.transpose() * out.duals;

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
