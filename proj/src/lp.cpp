#include "gridcarbon/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace gridcarbon {

const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEq: return ">=";
  }
  return "?";
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

int LinearProgram::add_variable(const std::string& name, double lower, double upper,
                                double cost) {
  variables.push_back({name, lower, upper});
  objective.resize(variables.size(), 0.0);
  objective.back() = cost;
  return static_cast<int>(variables.size()) - 1;
}

int LinearProgram::add_row(const std::string& name, Relation relation, double rhs,
                           std::vector<std::pair<int, double>> coeffs) {
  rows.push_back({name, std::move(coeffs), relation, rhs});
  return static_cast<int>(rows.size()) - 1;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-10;
constexpr int kBlandTrigger = 64;
constexpr int kRefactorPeriod = 200;

enum class VarState : char { Basic, AtLower, AtUpper, FreeZero };

struct Column {
  std::vector<std::pair<int, double>> entries;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;  // phase-2 cost (scaled)
};

double pow2_near(double x, int lo = -24, int hi = 24) {
  if (!(x > 0.0) || !std::isfinite(x)) return 1.0;
  int e = static_cast<int>(std::lround(std::log2(x)));
  e = std::max(lo, std::min(hi, e));
  return std::ldexp(1.0, e);
}

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolveOptions& options)
      : lp_(lp), opt_(options), n_(lp.num_variables()), m_(lp.num_rows()) {
    validate();
    equilibrate();
    build_columns();
  }

  LpSolution run() {
    init_basis();
    LpSolution out;

    if (num_artificials_ > 0) {
      Phase phase1 = run_phase(/*phase_one=*/true);
      if (phase1 == Phase::IterationLimit)
        fail(ErrorCode::NumericallySingular, "simplex iteration limit in phase 1");
      double infeas = phase_one_objective();
      if (infeas > opt_.feasibility_tol) {
        out.status = LpStatus::Infeasible;
        out.infeasibility = unscaled_infeasibility();
        out.max_primal_residual = out.infeasibility;
        out.iterations = iterations_;
        extract_values(out);
        return out;
      }
      retire_artificials();
    }

    Phase phase2 = run_phase(/*phase_one=*/false);
    if (phase2 == Phase::IterationLimit)
      fail(ErrorCode::NumericallySingular, "simplex iteration limit in phase 2");
    out.iterations = iterations_;
    if (phase2 == Phase::Unbounded) {
      out.status = LpStatus::Unbounded;
      out.unbounded_variable = unbounded_col_;
      extract_values(out);
      return out;
    }
    out.status = LpStatus::Optimal;
    extract_values(out);
    extract_duals(out);
    finish_optimal(out);
    return out;
  }

 private:
  enum class Phase { Optimal, Unbounded, IterationLimit };

  void validate() const {
    if (!lp_.objective.empty() && lp_.objective.size() != lp_.variables.size())
      fail(ErrorCode::MalformedProblem, "objective size does not match variable count");
    for (const auto& v : lp_.variables) {
      if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper ||
          v.lower == kInf || v.upper == -kInf)
        fail(ErrorCode::MalformedProblem, "variable " + v.name + " has invalid bounds");
    }
    for (const auto& c : lp_.objective)
      if (!std::isfinite(c)) fail(ErrorCode::MalformedProblem, "non-finite objective coefficient");
    for (const auto& row : lp_.rows) {
      if (!std::isfinite(row.rhs))
        fail(ErrorCode::MalformedProblem, "row " + row.name + " has non-finite rhs");
      for (const auto& [j, a] : row.coeffs) {
        if (j < 0 || j >= n_)
          fail(ErrorCode::MalformedProblem,
               "row " + row.name + " references undeclared variable index " + std::to_string(j));
        if (!std::isfinite(a))
          fail(ErrorCode::MalformedProblem, "row " + row.name + " has non-finite coefficient");
      }
    }
  }

  void equilibrate() {
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    if (!opt_.equilibrate) return;
    for (int i = 0; i < m_; ++i) {
      double amax = 0.0;
      for (const auto& [j, a] : lp_.rows[i].coeffs) amax = std::max(amax, std::abs(a));
      if (amax > 0.0) row_scale_[i] = pow2_near(1.0 / amax);
    }
    std::vector<double> cmax(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, a] : lp_.rows[i].coeffs)
        cmax[j] = std::max(cmax[j], std::abs(row_scale_[i] * a));
    for (int j = 0; j < n_; ++j)
      if (cmax[j] > 0.0) col_scale_[j] = pow2_near(1.0 / cmax[j]);
  }

  void build_columns() {
    cols_.resize(n_ + m_);
    // structural columns (scaled)
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : lp_.rows[i].coeffs) {
        double v = row_scale_[i] * a * col_scale_[j];
        if (v != 0.0) cols_[j].entries.emplace_back(i, v);
      }
    }
    for (int j = 0; j < n_; ++j) {
      // accumulate duplicate indices within a row
      auto& e = cols_[j].entries;
      std::sort(e.begin(), e.end());
      size_t w = 0;
      for (size_t r = 0; r < e.size(); ++r) {
        if (w > 0 && e[w - 1].first == e[r].first)
          e[w - 1].second += e[r].second;
        else
          e[w++] = e[r];
      }
      e.resize(w);
      cols_[j].lower = lp_.variables[j].lower / col_scale_[j];
      cols_[j].upper = lp_.variables[j].upper / col_scale_[j];
      cols_[j].cost = (j < static_cast<int>(lp_.objective.size()) ? lp_.objective[j] : 0.0) *
                      col_scale_[j];
    }
    // slack columns: row i becomes a.x + s = b with s sign-restricted by relation
    for (int i = 0; i < m_; ++i) {
      Column& s = cols_[n_ + i];
      s.entries.emplace_back(i, 1.0);
      s.cost = 0.0;
      switch (lp_.rows[i].relation) {
        case Relation::LessEq: s.lower = 0.0; s.upper = kInf; break;
        case Relation::Equal: s.lower = 0.0; s.upper = 0.0; break;
        case Relation::GreaterEq: s.lower = -kInf; s.upper = 0.0; break;
      }
    }
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_[i] = row_scale_[i] * lp_.rows[i].rhs;
  }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case VarState::AtLower: return cols_[j].lower;
      case VarState::AtUpper: return cols_[j].upper;
      case VarState::FreeZero: return 0.0;
      case VarState::Basic: break;
    }
    return 0.0;
  }

  VarState initial_state(const Column& c) const {
    bool lo = std::isfinite(c.lower), up = std::isfinite(c.upper);
    if (lo && up) return std::abs(c.lower) <= std::abs(c.upper) ? VarState::AtLower : VarState::AtUpper;
    if (lo) return VarState::AtLower;
    if (up) return VarState::AtUpper;
    return VarState::FreeZero;
  }

  void init_basis() {
    int total = n_ + m_;
    state_.assign(total, VarState::AtLower);
    for (int j = 0; j < total; ++j) state_[j] = initial_state(cols_[j]);

    // residual of each row with every column nonbasic
    std::vector<double> r = b_;
    for (int j = 0; j < total; ++j) {
      double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& [i, a] : cols_[j].entries) r[i] -= a * v;
    }
    // slack was included above at its nonbasic value; undo to decide basis per row
    basis_.assign(m_, -1);
    x_basic_.assign(m_, 0.0);
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    num_artificials_ = 0;

    for (int i = 0; i < m_; ++i) {
      const Column& s = cols_[n_ + i];
      double r_i = r[i] + nonbasic_value(n_ + i);  // residual if the slack were basic
      if (r_i >= s.lower - 1e-12 && r_i <= s.upper + 1e-12) {
        basis_[i] = n_ + i;
        x_basic_[i] = std::min(std::max(r_i, s.lower), s.upper);
        state_[n_ + i] = VarState::Basic;
      } else {
        // slack stays nonbasic at the bound nearest the residual; an
        // artificial absorbs what is left
        state_[n_ + i] = r_i < s.lower ? VarState::AtLower : VarState::AtUpper;
        double resid = r_i - nonbasic_value(n_ + i);
        Column art;
        art.entries.emplace_back(i, resid >= 0.0 ? 1.0 : -1.0);
        art.lower = 0.0;
        art.upper = kInf;
        art.cost = 0.0;
        cols_.push_back(art);
        int aj = static_cast<int>(cols_.size()) - 1;
        basis_[i] = aj;
        x_basic_[i] = std::abs(resid);
        state_.push_back(VarState::Basic);
        binv_(i, i) = art.entries[0].second;  // inverse of a +-1 diagonal entry
        ++num_artificials_;
      }
    }
    first_artificial_ = n_ + m_;
  }

  bool is_artificial(int j) const { return j >= first_artificial_; }

  double cost_of(int j, bool phase_one) const {
    if (phase_one) return is_artificial(j) ? 1.0 : 0.0;
    return cols_[j].cost;
  }

  Eigen::VectorXd simplex_multipliers(bool phase_one) const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost_of(basis_[i], phase_one);
    return binv_.transpose() * cb;
  }

  double reduced_cost(int j, const Eigen::VectorXd& y, bool phase_one) const {
    double d = cost_of(j, phase_one);
    for (const auto& [i, a] : cols_[j].entries) d -= y(i) * a;
    return d;
  }

  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    for (const auto& [i, a] : cols_[j].entries) w += a * binv_.col(i);
    return w;
  }

  void refactorize() {
    if (m_ == 0) return;
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
    for (int k = 0; k < m_; ++k)
      for (const auto& [i, a] : cols_[basis_[k]].entries) basis_matrix(i, k) = a;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() < 1e-12 * std::max(1.0, diag.maxCoeff()))
      fail(ErrorCode::NumericallySingular, "basis matrix became singular");
    binv_ = lu.inverse();
    recompute_basic_values();
  }

  void recompute_basic_values() {
    std::vector<double> r = b_;
    for (int j = 0; j < static_cast<int>(cols_.size()); ++j) {
      if (state_[j] == VarState::Basic) continue;
      double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& [i, a] : cols_[j].entries) r[i] -= a * v;
    }
    Eigen::VectorXd rhs(m_);
    for (int i = 0; i < m_; ++i) rhs(i) = r[i];
    Eigen::VectorXd xb = binv_ * rhs;
    for (int i = 0; i < m_; ++i) x_basic_[i] = xb(i);
  }

  int max_iterations() const {
    if (opt_.max_iterations > 0) return opt_.max_iterations;
    return 50000 + 200 * (n_ + m_);
  }

  Phase run_phase(bool phase_one) {
    int total = static_cast<int>(cols_.size());
    int since_refactor = 0;
    int degenerate_run = 0;
    bool bland = false;
    // refactorization is O(m^3); amortize it against the O(m^2) updates
    const int refactor_period = std::max(kRefactorPeriod, m_ / 4);

    while (true) {
      if (iterations_ >= max_iterations()) return Phase::IterationLimit;
      if (since_refactor >= refactor_period) {
        refactorize();
        since_refactor = 0;
      }

      Eigen::VectorXd y = m_ > 0 ? simplex_multipliers(phase_one) : Eigen::VectorXd();

      // pricing
      int entering = -1;
      int direction = 0;
      double best = opt_.optimality_tol;
      for (int j = 0; j < total; ++j) {
        if (state_[j] == VarState::Basic) continue;
        if (cols_[j].lower == cols_[j].upper) continue;  // fixed, can never move
        if (!phase_one && is_artificial(j)) continue;
        double d = reduced_cost(j, y, phase_one);
        int dir = 0;
        if ((state_[j] == VarState::AtLower || state_[j] == VarState::FreeZero) &&
            d < -opt_.optimality_tol)
          dir = +1;
        else if ((state_[j] == VarState::AtUpper || state_[j] == VarState::FreeZero) &&
                 d > opt_.optimality_tol)
          dir = -1;
        if (dir == 0) continue;
        if (bland) {
          entering = j;
          direction = dir;
          break;  // smallest index
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          direction = dir;
        }
      }
      if (entering < 0) return Phase::Optimal;

      Eigen::VectorXd w = m_ > 0 ? ftran(entering) : Eigen::VectorXd();

      // ratio test: entering moves by t >= 0 in `direction`, basics move by -t*direction*w
      double t_own = cols_[entering].upper - cols_[entering].lower;  // may be +inf
      double t_best = kInf;
      int leave = -1;
      bool leave_at_upper = false;
      for (int k = 0; k < m_; ++k) {
        double delta = direction * w(k);
        double t_k;
        bool at_upper;
        if (delta > kPivotTol) {
          double bound = cols_[basis_[k]].lower;
          if (!std::isfinite(bound)) continue;
          t_k = (x_basic_[k] - bound) / delta;
          at_upper = false;
        } else if (delta < -kPivotTol) {
          double bound = cols_[basis_[k]].upper;
          if (!std::isfinite(bound)) continue;
          t_k = (x_basic_[k] - bound) / delta;
          at_upper = true;
        } else {
          continue;
        }
        if (t_k < 0.0) t_k = 0.0;  // drift guard
        bool take;
        if (leave < 0) {
          take = t_k < t_best;
        } else if (bland) {
          take = t_k < t_best - 1e-12 ||
                 (t_k <= t_best + 1e-12 && basis_[k] < basis_[leave]);
        } else {
          take = t_k < t_best - 1e-9 ||
                 (t_k <= t_best + 1e-9 && std::abs(w(k)) > std::abs(w(leave)));
        }
        if (take) {
          t_best = t_k;
          leave = k;
          leave_at_upper = at_upper;
        }
      }

      double t = std::min(t_best, t_own);
      if (!std::isfinite(t)) {
        if (phase_one)
          fail(ErrorCode::NumericallySingular, "phase-1 objective unbounded");
        unbounded_col_ = entering;
        return Phase::Unbounded;
      }

      ++iterations_;
      ++since_refactor;
      if (t <= kDegenerateStep) {
        if (++degenerate_run > kBlandTrigger) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      if (t_own <= t_best) {
        // bound flip, basis unchanged
        for (int k = 0; k < m_; ++k) x_basic_[k] -= t_own * direction * w(k);
        state_[entering] =
            state_[entering] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        continue;
      }

      // pivot
      double entering_value = nonbasic_value(entering) + direction * t;
      for (int k = 0; k < m_; ++k) x_basic_[k] -= t * direction * w(k);
      int leaving_col = basis_[leave];
      state_[leaving_col] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
      basis_[leave] = entering;
      x_basic_[leave] = entering_value;
      state_[entering] = VarState::Basic;

      // explicit inverse update
      double pivot = w(leave);
      Eigen::RowVectorXd pivot_row = binv_.row(leave) / pivot;
      for (int k = 0; k < m_; ++k) {
        if (k == leave) continue;
        double factor = w(k);
        if (factor != 0.0) binv_.row(k) -= factor * pivot_row;
      }
      binv_.row(leave) = pivot_row;
    }
  }

  double phase_one_objective() const {
    double sum = 0.0;
    for (int i = 0; i < m_; ++i)
      if (is_artificial(basis_[i])) sum += std::max(0.0, x_basic_[i]);
    return sum;
  }

  double unscaled_infeasibility() const {
    double sum = 0.0;
    for (int i = 0; i < m_; ++i)
      if (is_artificial(basis_[i])) sum += std::max(0.0, x_basic_[i]) / row_scale_[i];
    return sum;
  }

  void retire_artificials() {
    // fix all artificials at zero so phase 2 can never move them
    for (int j = first_artificial_; j < static_cast<int>(cols_.size()); ++j) {
      cols_[j].lower = 0.0;
      cols_[j].upper = 0.0;
      if (state_[j] != VarState::Basic) state_[j] = VarState::AtLower;
    }
    // drive basic artificials out where a structural pivot exists
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      Eigen::RowVectorXd rho = binv_.row(i);
      int candidate = -1;
      for (int j = 0; j < first_artificial_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        double alpha = 0.0;
        for (const auto& [r, a] : cols_[j].entries) alpha += rho(r) * a;
        if (std::abs(alpha) > 1e-8) {
          candidate = j;
          break;
        }
      }
      if (candidate < 0) continue;  // redundant row, artificial stays basic at zero
      Eigen::VectorXd w = ftran(candidate);
      double pivot = w(i);
      int art = basis_[i];
      basis_[i] = candidate;
      x_basic_[i] = nonbasic_value(candidate);  // degenerate pivot, nothing moves
      state_[candidate] = VarState::Basic;
      state_[art] = VarState::AtLower;
      Eigen::RowVectorXd pivot_row = binv_.row(i) / pivot;
      for (int k = 0; k < m_; ++k) {
        if (k == i) continue;
        double factor = w(k);
        if (factor != 0.0) binv_.row(k) -= factor * pivot_row;
      }
      binv_.row(i) = pivot_row;
      recompute_basic_values();
    }
  }

  void extract_values(LpSolution& out) const {
    out.values.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (state_[j] != VarState::Basic) out.values[j] = nonbasic_value(j) * col_scale_[j];
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.values[basis_[i]] = x_basic_[i] * col_scale_[basis_[i]];
    out.objective_value = 0.0;
    for (int j = 0; j < n_ && j < static_cast<int>(lp_.objective.size()); ++j)
      out.objective_value += lp_.objective[j] * out.values[j];
  }

  void extract_duals(LpSolution& out) const {
    Eigen::VectorXd y = m_ > 0 ? simplex_multipliers(/*phase_one=*/false) : Eigen::VectorXd();
    out.duals.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) out.duals[i] = y(i) * row_scale_[i];
  }

  void finish_optimal(LpSolution& out) const {
    double max_resid = 0.0;
    for (int i = 0; i < m_; ++i) {
      const LpRow& row = lp_.rows[i];
      double act = 0.0, norm = 1.0;
      for (const auto& [j, a] : row.coeffs) {
        act += a * out.values[j];
        norm = std::max(norm, std::abs(a));
      }
      double viol = 0.0;
      switch (row.relation) {
        case Relation::LessEq: viol = std::max(0.0, act - row.rhs); break;
        case Relation::GreaterEq: viol = std::max(0.0, row.rhs - act); break;
        case Relation::Equal: viol = std::abs(act - row.rhs); break;
      }
      max_resid = std::max(max_resid, viol / norm);
    }
    for (int j = 0; j < n_; ++j) {
      const LpVariable& v = lp_.variables[j];
      if (std::isfinite(v.lower)) max_resid = std::max(max_resid, v.lower - out.values[j]);
      if (std::isfinite(v.upper)) max_resid = std::max(max_resid, out.values[j] - v.upper);
    }
    out.max_primal_residual = max_resid;
  }

  const LinearProgram& lp_;
  SolveOptions opt_;
  int n_ = 0;
  int m_ = 0;
  std::vector<double> row_scale_, col_scale_;
  std::vector<Column> cols_;
  std::vector<double> b_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  std::vector<double> x_basic_;
  Eigen::MatrixXd binv_;
  int first_artificial_ = 0;
  int num_artificials_ = 0;
  int iterations_ = 0;
  int unbounded_col_ = -1;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& options) {
  Simplex simplex(lp, options);
  return simplex.run();
}

ResidualReport check_solution(const LinearProgram& lp, const LpSolution& solution, double tol) {
  if (solution.values.size() != lp.variables.size())
    fail(ErrorCode::MalformedProblem, "solution has wrong number of values");
  ResidualReport report;
  for (size_t j = 0; j < lp.variables.size(); ++j) {
    const LpVariable& v = lp.variables[j];
    double x = solution.values[j];
    if (std::isfinite(v.lower))
      report.max_bound_violation = std::max(report.max_bound_violation, v.lower - x);
    if (std::isfinite(v.upper))
      report.max_bound_violation = std::max(report.max_bound_violation, x - v.upper);
  }
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    const LpRow& row = lp.rows[i];
    double act = 0.0;
    for (const auto& [j, a] : row.coeffs) act += a * solution.values[j];
    double viol = 0.0;
    switch (row.relation) {
      case Relation::LessEq: viol = std::max(0.0, act - row.rhs); break;
      case Relation::GreaterEq: viol = std::max(0.0, row.rhs - act); break;
      case Relation::Equal: viol = std::abs(act - row.rhs); break;
    }
    report.max_row_violation = std::max(report.max_row_violation, viol);
    if (i < solution.duals.size() && row.relation != Relation::Equal) {
      double slack = row.relation == Relation::LessEq ? row.rhs - act : act - row.rhs;
      if (slack > tol)
        report.complementarity_gap =
            std::max(report.complementarity_gap, std::abs(solution.duals[i] * slack));
    }
  }
  return report;
}

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream out;
  out << "minimize";
  for (size_t j = 0; j < lp.variables.size(); ++j) {
    double c = j < lp.objective.size() ? lp.objective[j] : 0.0;
    if (c != 0.0) out << " " << c << "*" << lp.variables[j].name;
  }
  out << "\n";
  for (const auto& v : lp.variables)
    out << "var " << v.name << " in [" << v.lower << ", " << v.upper << "]\n";
  for (const auto& row : lp.rows) {
    out << row.name << " " << to_string(row.relation) << " " << row.rhs << " :";
    for (const auto& [j, a] : row.coeffs) out << " " << a << "*" << lp.variables[j].name;
    out << "\n";
  }
  return out.str();
}

}  // namespace gridcarbon
