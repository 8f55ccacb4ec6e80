// Dense two-phase primal simplex for small LPs.
#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace avc {

struct LpRow {
  std::vector<std::pair<int, double>> coef;
  double rhs = 0;
};

struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;  // minimized; empty means pure feasibility
  std::vector<LpRow> eq;          // a.x = b
  std::vector<LpRow> le;          // a.x <= b
  std::vector<double> lower;      // finite; default 0
  std::vector<double> upper;      // may be +inf; default +inf

  explicit LinearProgram(int n = 0);
  int add_var(double lo = 0.0, double hi = std::numeric_limits<double>::infinity());
  void add_eq(std::vector<std::pair<int, double>> coef, double rhs);
  void add_le(std::vector<std::pair<int, double>> coef, double rhs);
  void add_ge(std::vector<std::pair<int, double>> coef, double rhs);
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpOptions {
  double feas_tol = 1e-9;   // phase-1 residual above this means infeasible
  double pivot_tol = 1e-11;
  int max_iter = 0;         // 0: automatic
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double value = 0;
  double infeasibility = 0;  // phase-1 optimum (sum of artificials)
  int iterations = 0;

  bool feasible() const { return status == LpStatus::optimal; }
};

LpResult lp_solve(const LinearProgram& lp, const LpOptions& opt = {});

// Largest violation of any constraint or bound at x.
double lp_max_violation(const LinearProgram& lp, const std::vector<double>& x);

const char* to_string(LpStatus s);

}  // namespace avc
