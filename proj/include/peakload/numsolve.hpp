#pragma once

// Dense LP / convex QP solving with dual extraction.
//
// Conventions used throughout the library:
//   * duals[i] is the sensitivity d(objective)/d(rhs_i) of the stated
//     problem in its stated sense. For a minimization this makes duals of
//     ">=" rows nonnegative and duals of "<=" rows nonpositive; for a
//     maximization the signs flip.
//   * reduced_costs = grad f(x) - A^T duals, where f is the stated objective
//     (c^T x + 1/2 x^T Q x). They are the multipliers of the variable bounds.

#include "peakload/errors.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace peakload {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Sense { minimize, maximize };
enum class RowKind { less_equal, greater_equal, equal };
enum class SolveStatus { optimal, infeasible, unbounded };

const char* to_string(SolveStatus status);

struct Tolerances {
  double feas = 1e-9;        // primal/dual feasibility and complementarity
  double cert = 1e-7;        // relative duality gap and stationarity
  double zero_pivot = 1e-12; // pivots below this are treated as zero
};

struct LpSpec {
  Sense sense = Sense::minimize;
  VectorXd cost;
  MatrixXd matrix;
  VectorXd rhs;
  std::vector<RowKind> kinds;
  VectorXd lower;                 // empty means all zeros
  std::optional<VectorXd> upper;  // entries may be +infinity

  Index num_vars() const { return cost.size(); }
  Index num_rows() const { return rhs.size(); }
  VectorXd lower_bounds() const;
  VectorXd upper_bounds() const;  // +infinity where absent

  // Throws Error(invalid_input) when dimensions disagree or data is not finite.
  void check() const;
};

// Objective c^T x + 1/2 x^T Q x. Q must be PSD for minimize and NSD for
// maximize.
struct QpSpec : LpSpec {
  MatrixXd quadratic;

  QpSpec() = default;
  explicit QpSpec(LpSpec lp) : LpSpec(std::move(lp)) {}

  void check() const;
};

struct Certificate {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  double duality_gap = 0.0;  // |primal - dual| / (1 + |primal|)
  bool ok = false;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::infeasible;
  VectorXd primal;
  double objective = 0.0;
  VectorXd duals;
  VectorXd reduced_costs;
  std::vector<Index> active_set;
  Certificate certificate;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::optimal; }
};

// Thrown by model builders when a program they expect to be optimal is not.
class StatusError : public Error {
 public:
  StatusError(SolveStatus status, const std::string& what)
      : Error(ErrorCode::numeric_breakdown, what + " returned status " + to_string(status)), status_(status) {}

  SolveStatus status() const noexcept { return status_; }

 private:
  SolveStatus status_;
};

// Two-phase primal simplex on a dense tableau with Bland's rule. The final
// basis is refactored with LU so primal values and duals are exact basic
// solutions rather than accumulated tableau entries.
SolveOutcome solve_lp(const LpSpec& spec, const Tolerances& tol = {});

// Convex QP via Lemke's complementary pivoting with lexicographic ratio test.
// Throws Error(not_convex) when Q fails the semidefiniteness check.
SolveOutcome solve_qp(const QpSpec& spec, const Tolerances& tol = {});

// Recomputes residuals of an outcome against its spec. LPs are checked as QPs
// with Q = 0.
Certificate certify(const QpSpec& spec, const SolveOutcome& outcome, const Tolerances& tol = {});
Certificate certify(const LpSpec& spec, const SolveOutcome& outcome, const Tolerances& tol = {});

// Least-norm point of the optimal face. x is optimal iff it is feasible and
// complementary to the multipliers already found, and (for QPs) Qx = Qx*.
// The returned outcome keeps the original multipliers.
SolveOutcome select_least_norm(const QpSpec& spec, const SolveOutcome& outcome,
                               const Tolerances& tol = {});
SolveOutcome select_least_norm(const LpSpec& spec, const SolveOutcome& outcome,
                               const Tolerances& tol = {});

// Checks whether prescribing some row duals still admits an optimal dual
// solution: solves the dual LP with those entries fixed and compares its
// value against `primal_objective`. Useful on degenerate programs where the
// optimal dual is not unique.
struct DualCandidateCheck {
  bool feasible = false;
  double dual_objective = 0.0;
  bool optimal = false;
  VectorXd completed_duals;
};
DualCandidateCheck check_dual_candidate(const LpSpec& spec, double primal_objective,
                                        const std::vector<std::pair<Index, double>>& fixed,
                                        const Tolerances& tol = {});

// Incremental construction of programs with sparse rows.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(Sense sense = Sense::minimize) : sense_(sense) {}

  Index add_variable(double cost, double lower = 0.0,
                     double upper = std::numeric_limits<double>::infinity());
  Index add_row(const std::vector<std::pair<Index, double>>& coeffs, RowKind kind, double rhs);
  void add_quadratic(Index i, Index j, double value);  // adds value to Q(i,j) and Q(j,i) if i != j
  void set_cost(Index var, double cost);

  Index num_vars() const { return static_cast<Index>(cost_.size()); }
  Index num_rows() const { return static_cast<Index>(rhs_.size()); }

  LpSpec lp() const;
  QpSpec qp() const;

 private:
  Sense sense_;
  std::vector<double> cost_, lower_, upper_;
  std::vector<std::vector<std::pair<Index, double>>> rows_;
  std::vector<RowKind> kinds_;
  std::vector<double> rhs_;
  std::vector<std::tuple<Index, Index, double>> quad_;
};

}  // namespace peakload
