#include "avc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avc {

LinearProgram::LinearProgram(int n)
    : num_vars(n), lower(n, 0.0), upper(n, std::numeric_limits<double>::infinity()) {}

int LinearProgram::add_var(double lo, double hi) {
  lower.push_back(lo);
  upper.push_back(hi);
  if (!objective.empty()) objective.push_back(0.0);
  return num_vars++;
}

void LinearProgram::add_eq(std::vector<std::pair<int, double>> coef, double rhs) {
  eq.push_back({std::move(coef), rhs});
}

void LinearProgram::add_le(std::vector<std::pair<int, double>> coef, double rhs) {
  le.push_back({std::move(coef), rhs});
}

void LinearProgram::add_ge(std::vector<std::pair<int, double>> coef, double rhs) {
  for (auto& c : coef) c.second = -c.second;
  le.push_back({std::move(coef), -rhs});
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

namespace {

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_((rows) * (cols + 1), 0.0), obj_(cols + 1, 0.0), basis_(rows, -1) {}

  double& at(int r, int c) { return a_[r * (n_ + 1) + c]; }
  double& rhs(int r) { return a_[r * (n_ + 1) + n_]; }
  std::vector<double>& obj() { return obj_; }
  std::vector<int>& basis() { return basis_; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  void pivot(int r, int e) {
    double* pr = &a_[r * (n_ + 1)];
    double inv = 1.0 / pr[e];
    for (int j = 0; j <= n_; ++j) pr[j] *= inv;
    pr[e] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = &a_[i * (n_ + 1)];
      double f = pi[e];
      if (f == 0.0) continue;
      for (int j = 0; j <= n_; ++j) pi[j] -= f * pr[j];
      pi[e] = 0.0;
      if (std::abs(pi[n_]) < 1e-14) pi[n_] = 0.0;
    }
    double f = obj_[e];
    if (f != 0.0) {
      for (int j = 0; j <= n_; ++j) obj_[j] -= f * pr[j];
      obj_[e] = 0.0;
    }
    basis_[r] = e;
  }

  // Minimizes with the current reduced-cost row. Columns with allowed[j]==0
  // never enter. Returns status (optimal/unbounded/iteration_limit).
  LpStatus run(const std::vector<char>& allowed, const LpOptions& opt, int& iters, int max_iter) {
    int degenerate = 0;
    const double rc_tol = 1e-10;
    while (true) {
      if (iters >= max_iter) return LpStatus::iteration_limit;
      bool bland = degenerate > 50;
      int e = -1;
      double best = -rc_tol;
      for (int j = 0; j < n_; ++j) {
        if (!allowed[j]) continue;
        if (obj_[j] < best) {
          e = j;
          if (bland) break;
          best = obj_[j];
        }
      }
      if (e < 0) return LpStatus::optimal;
      int r = -1;
      double ratio = 0;
      for (int i = 0; i < m_; ++i) {
        double v = at(i, e);
        if (v <= opt.pivot_tol) continue;
        double q = std::max(rhs(i), 0.0) / v;
        if (r < 0 || q < ratio - 1e-12 || (q <= ratio + 1e-12 && basis_[i] < basis_[r])) {
          r = i;
          ratio = q;
        }
      }
      if (r < 0) return LpStatus::unbounded;
      degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
      pivot(r, e);
      ++iters;
    }
  }

 private:
  int m_, n_;
  std::vector<double> a_;
  std::vector<double> obj_;
  std::vector<int> basis_;
};

}  // namespace

LpResult lp_solve(const LinearProgram& lp, const LpOptions& opt) {
  const int n = lp.num_vars;
  if (static_cast<int>(lp.lower.size()) != n || static_cast<int>(lp.upper.size()) != n)
    throw std::invalid_argument("lp_solve: bound vectors have wrong length");
  if (!lp.objective.empty() && static_cast<int>(lp.objective.size()) != n)
    throw std::invalid_argument("lp_solve: objective has wrong length");
  for (int j = 0; j < n; ++j)
    if (!std::isfinite(lp.lower[j])) throw std::invalid_argument("lp_solve: lower bounds must be finite");

  // Row list in shifted variables x' = x - lower.
  struct Row {
    std::vector<std::pair<int, double>> coef;
    double rhs;
    bool is_le;
  };
  std::vector<Row> rows;
  auto shifted = [&](const LpRow& r) {
    double b = r.rhs;
    for (auto [j, v] : r.coef) {
      if (j < 0 || j >= n) throw std::invalid_argument("lp_solve: variable index out of range");
      b -= v * lp.lower[j];
    }
    return b;
  };
  for (const auto& r : lp.eq) rows.push_back({r.coef, shifted(r), false});
  for (const auto& r : lp.le) rows.push_back({r.coef, shifted(r), true});
  for (int j = 0; j < n; ++j)
    if (std::isfinite(lp.upper[j])) rows.push_back({{{j, 1.0}}, lp.upper[j] - lp.lower[j], true});

  const int m = static_cast<int>(rows.size());
  int num_slack = 0;
  for (const auto& r : rows) num_slack += r.is_le ? 1 : 0;
  // An artificial is needed unless the row has a +1 slack and rhs >= 0.
  std::vector<char> need_art(m, 0);
  int num_art = 0;
  for (int i = 0; i < m; ++i) {
    need_art[i] = !(rows[i].is_le && rows[i].rhs >= 0);
    num_art += need_art[i];
  }
  const int cols = n + num_slack + num_art;
  Tableau t(m, cols);
  int slack_col = n, art_col = n + num_slack;
  for (int i = 0; i < m; ++i) {
    double sign = rows[i].rhs < 0 ? -1.0 : 1.0;
    for (auto [j, v] : rows[i].coef) t.at(i, j) += sign * v;
    t.rhs(i) = sign * rows[i].rhs;
    if (rows[i].is_le) {
      t.at(i, slack_col) = sign;
      if (!need_art[i]) t.basis()[i] = slack_col;
      ++slack_col;
    }
    if (need_art[i]) {
      t.at(i, art_col) = 1.0;
      t.basis()[i] = art_col;
      ++art_col;
    }
  }

  LpResult res;
  int iters = 0;
  int max_iter = opt.max_iter > 0 ? opt.max_iter : 50 * (m + cols) + 1000;
  std::vector<char> allowed(cols, 1);

  if (num_art > 0) {
    auto& ob = t.obj();
    std::fill(ob.begin(), ob.end(), 0.0);
    for (int i = 0; i < m; ++i) {
      if (!need_art[i]) continue;
      for (int j = 0; j <= cols; ++j) ob[j] -= (j == cols ? t.rhs(i) : t.at(i, j));
    }
    for (int j = n + num_slack; j < cols; ++j) ob[j] = 0.0;
    LpStatus st = t.run(allowed, opt, iters, max_iter);
    res.iterations = iters;
    if (st == LpStatus::iteration_limit) {
      res.status = st;
      return res;
    }
    res.infeasibility = std::max(0.0, -t.obj()[cols]);
    if (res.infeasibility > opt.feas_tol) {
      res.status = LpStatus::infeasible;
      return res;
    }
    // Drive artificials out of the basis; drop redundant rows.
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] < n + num_slack) continue;
      int e = -1;
      double bestv = 1e-9;
      for (int j = 0; j < n + num_slack; ++j) {
        if (std::abs(t.at(i, j)) > bestv) {
          bestv = std::abs(t.at(i, j));
          e = j;
        }
      }
      if (e >= 0) {
        t.pivot(i, e);
      } else {
        for (int j = 0; j <= cols; ++j) t.at(i, j) = 0.0;
        t.rhs(i) = 0.0;
      }
    }
    for (int j = n + num_slack; j < cols; ++j) allowed[j] = 0;
  }

  auto& ob = t.obj();
  std::fill(ob.begin(), ob.end(), 0.0);
  if (!lp.objective.empty()) {
    for (int j = 0; j < n; ++j) ob[j] = lp.objective[j];
    for (int i = 0; i < m; ++i) {
      int b = t.basis()[i];
      if (b < 0 || b >= n) continue;
      double c = lp.objective[b];
      if (c == 0.0) continue;
      for (int j = 0; j <= cols; ++j) ob[j] -= c * (j == cols ? t.rhs(i) : t.at(i, j));
    }
    for (int j = 0; j < cols; ++j)
      if (!allowed[j]) ob[j] = 0.0;
    LpStatus st = t.run(allowed, opt, iters, max_iter);
    res.iterations = iters;
    if (st != LpStatus::optimal) {
      res.status = st;
      return res;
    }
  }

  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    int b = t.basis()[i];
    if (b >= 0 && b < n) res.x[b] = std::max(0.0, t.rhs(i));
  }
  for (int j = 0; j < n; ++j) {
    res.x[j] += lp.lower[j];
    if (std::isfinite(lp.upper[j])) res.x[j] = std::min(res.x[j], lp.upper[j]);
  }
  res.value = 0;
  if (!lp.objective.empty())
    for (int j = 0; j < n; ++j) res.value += lp.objective[j] * res.x[j];
  res.status = LpStatus::optimal;
  res.iterations = iters;
  return res;
}

double lp_max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double v = 0;
  auto dot = [&](const LpRow& r) {
    double s = 0;
    for (auto [j, c] : r.coef) s += c * x[j];
    return s;
  };
  for (const auto& r : lp.eq) v = std::max(v, std::abs(dot(r) - r.rhs));
  for (const auto& r : lp.le) v = std::max(v, dot(r) - r.rhs);
  for (int j = 0; j < lp.num_vars; ++j) {
    v = std::max(v, lp.lower[j] - x[j]);
    if (std::isfinite(lp.upper[j])) v = std::max(v, x[j] - lp.upper[j]);
  }
  return v;
}

}  // namespace avc
