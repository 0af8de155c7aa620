#include "peakload/errors.hpp"
#include "peakload/numsolve.hpp"

#include <cmath>

namespace peakload {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::empty_set: return "EmptySet";
    case ErrorCode::unbounded_set: return "UnboundedSet";
    case ErrorCode::dimension_too_large: return "DimensionTooLarge";
    case ErrorCode::numeric_breakdown: return "NumericBreakdown";
    case ErrorCode::not_convex: return "NotConvex";
    case ErrorCode::bad_mean: return "BadMean";
    case ErrorCode::bad_delta: return "BadDelta";
    case ErrorCode::bad_params: return "BadParams";
    case ErrorCode::bad_alpha: return "BadAlpha";
    case ErrorCode::bad_var: return "BadVar";
    case ErrorCode::saddle_violated: return "SaddleViolated";
    case ErrorCode::no_capacity: return "NoCapacity";
    case ErrorCode::not_equilibrium: return "NotEquilibrium";
    case ErrorCode::wrong_demand_mode: return "WrongDemandMode";
  }
  return "Unknown";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

VectorXd LpSpec::lower_bounds() const {
  if (lower.size() == 0) return VectorXd::Zero(num_vars());
  return lower;
}

VectorXd LpSpec::upper_bounds() const {
  if (!upper) return VectorXd::Constant(num_vars(), std::numeric_limits<double>::infinity());
  return *upper;
}

void LpSpec::check() const {
  const Index n = num_vars();
  const Index m = num_rows();
  if (matrix.rows() != m || matrix.cols() != n) {
    throw Error(ErrorCode::invalid_input, "constraint matrix is " + std::to_string(matrix.rows()) +
                                              "x" + std::to_string(matrix.cols()) + ", expected " +
                                              std::to_string(m) + "x" + std::to_string(n));
  }
  if (static_cast<Index>(kinds.size()) != m) {
    throw Error(ErrorCode::invalid_input, "row kind count does not match rhs length");
  }
  if (lower.size() != 0 && lower.size() != n) {
    throw Error(ErrorCode::invalid_input, "lower bound length does not match variable count");
  }
  if (upper && upper->size() != n) {
    throw Error(ErrorCode::invalid_input, "upper bound length does not match variable count");
  }
  if (!cost.allFinite() || !matrix.allFinite() || !rhs.allFinite() ||
      (lower.size() != 0 && !lower.allFinite())) {
    throw Error(ErrorCode::invalid_input, "program data must be finite");
  }
  if (upper) {
    for (Index j = 0; j < n; ++j) {
      if (std::isnan((*upper)(j))) throw Error(ErrorCode::invalid_input, "upper bound is NaN");
    }
  }
}

void QpSpec::check() const {
  LpSpec::check();
  if (quadratic.size() == 0) return;
  if (quadratic.rows() != num_vars() || quadratic.cols() != num_vars()) {
    throw Error(ErrorCode::invalid_input, "quadratic matrix has wrong shape");
  }
  if (!quadratic.allFinite()) throw Error(ErrorCode::invalid_input, "quadratic matrix not finite");
  if ((quadratic - quadratic.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::invalid_input, "quadratic matrix is not symmetric");
  }
}

Index ProgramBuilder::add_variable(double cost, double lower, double upper) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return static_cast<Index>(cost_.size()) - 1;
}

Index ProgramBuilder::add_row(const std::vector<std::pair<Index, double>>& coeffs, RowKind kind,
                              double rhs) {
  rows_.push_back(coeffs);
  kinds_.push_back(kind);
  rhs_.push_back(rhs);
  return static_cast<Index>(rhs_.size()) - 1;
}

void ProgramBuilder::add_quadratic(Index i, Index j, double value) {
  quad_.emplace_back(i, j, value);
}

void ProgramBuilder::set_cost(Index var, double cost) { cost_.at(static_cast<size_t>(var)) = cost; }

LpSpec ProgramBuilder::lp() const {
  const Index n = num_vars();
  const Index m = num_rows();
  LpSpec spec;
  spec.sense = sense_;
  spec.cost = Eigen::Map<const VectorXd>(cost_.data(), n);
  spec.matrix = MatrixXd::Zero(m, n);
  for (Index i = 0; i < m; ++i) {
    for (const auto& [j, v] : rows_[static_cast<size_t>(i)]) spec.matrix(i, j) += v;
  }
  spec.rhs = Eigen::Map<const VectorXd>(rhs_.data(), m);
  spec.kinds = kinds_;
  spec.lower = Eigen::Map<const VectorXd>(lower_.data(), n);
  bool any_upper = false;
  for (double u : upper_) any_upper = any_upper || std::isfinite(u);
  if (any_upper) spec.upper = Eigen::Map<const VectorXd>(upper_.data(), n);
  return spec;
}

QpSpec ProgramBuilder::qp() const {
  QpSpec spec(lp());
  const Index n = num_vars();
  spec.quadratic = MatrixXd::Zero(n, n);
  for (const auto& [i, j, v] : quad_) {
    spec.quadratic(i, j) += v;
    if (i != j) spec.quadratic(j, i) += v;
  }
  return spec;
}

}  // namespace peakload
