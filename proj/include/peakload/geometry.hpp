#pragma once

// Polyhedral uncertainty sets {u >= 0 : P u <= r}.

#include "peakload/numsolve.hpp"

#include <string>
#include <vector>

namespace peakload {

struct Polytope {
  MatrixXd P;
  VectorXd r;

  Polytope() = default;
  Polytope(MatrixXd p, VectorXd rhs);

  Index dim() const { return P.cols(); }
  Index num_rows() const { return P.rows(); }
  bool contains(const VectorXd& u, double tol = 1e-9) const;

  static Polytope box(Index n);      // [0,1]^n
  static Polytope simplex(Index n);  // sum u <= 1
};

struct ValidationReport {
  bool contains_zero = false;
  bool inside_unit_box = false;
  bool bounded = false;
  bool nonempty = false;
  VectorXd axis_maxima;  // +inf on unbounded axes
  bool is_valid_uncertainty_set = false;
  std::vector<std::string> warnings;
};

struct TauResult {
  double tau = 0.0;
  VectorXd witness;  // min_i witness_i == tau
};

struct LinearMax {
  double value = 0.0;
  VectorXd argmax;
};

// Largest t such that some u in U has every coordinate >= t.
// Throws Error(empty_set) or Error(unbounded_set).
TauResult tau(const Polytope& u);

// Exhaustive basis enumeration; vertices sorted lexicographically.
// Throws Error(dimension_too_large) above kMaxEnumerationDim.
inline constexpr Index kMaxEnumerationDim = 12;
std::vector<VectorXd> enumerate_vertices(const Polytope& u);

// One LP per axis. Never throws for well-formed matrices; failures are flags.
ValidationReport validate(const Polytope& u);

// Cartesian product of T copies; coordinate (i, t) has index t * n + i.
Polytope lift_product(const Polytope& uprime, Index periods);

// max w^T u over U. Throws Error(empty_set) or Error(unbounded_set).
LinearMax maximize_linear(const Polytope& u, const VectorXd& w);

// Inequality description of conv(points). Points must be nonnegative.
// Supported when the ambient dimension is at most 3 or there are at most 12
// points; otherwise throws Error(dimension_too_large).
Polytope hull_to_polytope(const std::vector<VectorXd>& points);

// Vertex sets equal up to tolerance, independent of order.
bool same_point_set(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b, double tol = 1e-9);

}  // namespace peakload
