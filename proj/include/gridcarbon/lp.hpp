#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gridcarbon/errors.hpp"

namespace gridcarbon {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, Equal, GreaterEq };

const char* to_string(Relation rel);

struct LpVariable {
  std::string name;
  double lower = 0.0;  // may be -inf
  double upper = kInf;
};

struct LpRow {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  Relation relation = Relation::LessEq;
  double rhs = 0.0;
};

/// General-form minimization LP: variable bounds plus inequality/equality rows.
struct LinearProgram {
  std::vector<LpVariable> variables;
  std::vector<LpRow> rows;
  std::vector<double> objective;  // minimize; empty means all-zero

  int add_variable(const std::string& name, double lower, double upper, double cost = 0.0);
  int add_row(const std::string& name, Relation relation, double rhs,
              std::vector<std::pair<int, double>> coeffs);
  int num_variables() const { return static_cast<int>(variables.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;  // per variable
  double objective_value = 0.0;
  std::vector<double> duals;  // per row simplex multipliers, Optimal only
  /// Max violation over rows and bounds after row-norm scaling.
  double max_primal_residual = 0.0;
  /// Phase-1 certificate: residual infeasibility that could not be removed.
  double infeasibility = 0.0;
  /// Entering variable of the improving ray when Unbounded (structural index,
  /// or num_variables()+i for the slack of row i).
  int unbounded_variable = -1;
  int iterations = 0;
};

struct SolveOptions {
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-7;
  bool equilibrate = true;
  int max_iterations = 0;  // 0 = derived from problem size
};

/// Deterministic bounded-variable revised simplex with a two-phase start.
/// Dantzig pricing with smallest-index tie-breaking, switching to Bland's
/// rule after a run of degenerate pivots.
LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& options = {});

struct ResidualReport {
  double max_bound_violation = 0.0;
  double max_row_violation = 0.0;
  double complementarity_gap = 0.0;
  bool within(double tol) const {
    return max_bound_violation <= tol && max_row_violation <= tol;
  }
};

/// Residuals of an arbitrary candidate point against the LP, plus the
/// complementary-slackness gap against the solution's duals when present.
ResidualReport check_solution(const LinearProgram& lp, const LpSolution& solution,
                              double tol = 1e-6);

/// Debug dump, one row per line: name, relation, rhs, sparse coefficients.
std::string dump_lp(const LinearProgram& lp);

}  // namespace gridcarbon
