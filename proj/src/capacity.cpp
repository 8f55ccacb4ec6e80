#include "avc/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "avc/lp.hpp"
#include "avc/rng.hpp"

namespace avc {

namespace {

constexpr double kLogFloor = 1e-300;

// Linear row over the stacked variables z = (U blocks, atom weights).
struct Row {
  std::vector<double> a;
  double b = 0;
  bool eq = false;
  double norm2 = 0;
};

struct Feasible {
  int nu = 0, ns = 0, na = 0;
  std::vector<Row> rows;
  std::vector<std::vector<double>> atoms;  // atom state laws, cp-union only

  int dim() const { return nu * ns + na; }
};

Feasible build_feasible(const ObliviousAVC& avc, const Dist& P_u, const InnerOptions& opt, bool& approx) {
  Feasible F;
  F.nu = P_u.size();
  F.ns = avc.ns();
  approx = false;
  const auto& c = avc.lambda_s;
  if (c.is_polytope()) {
    for (int i = 0; i < c.polytope.rows(); ++i) {
      Row r;
      r.a.assign(F.dim(), 0.0);
      for (int u = 0; u < F.nu; ++u)
        for (int s = 0; s < F.ns; ++s) r.a[u * F.ns + s] = P_u[u] * c.polytope.A[i][s];
      r.b = c.polytope.gamma[i];
      F.rows.push_back(std::move(r));
    }
  } else {
    approx = true;
    const int nx = c.p_set.dim;
    for (const auto& R : simplex_net(nx, opt.cp_atom_net))
      if (polytope_contains(R, c.p_set, c.tol)) F.atoms.push_back(tensor_power(R, c.order).pmf());
    if (F.atoms.empty()) throw ValidationError("inner_min: no net atom lies in P_set");
    if (static_cast<int>(F.atoms.front().size()) != F.ns) throw ValidationError("inner_min: cp-union order does not match |S|");
    F.na = static_cast<int>(F.atoms.size());
    for (int s = 0; s < F.ns; ++s) {
      Row r;
      r.eq = true;
      r.a.assign(F.dim(), 0.0);
      for (int u = 0; u < F.nu; ++u) r.a[u * F.ns + s] = P_u[u];
      for (int j = 0; j < F.na; ++j) r.a[F.nu * F.ns + j] = -F.atoms[j][s];
      F.rows.push_back(std::move(r));
    }
  }
  for (auto& r : F.rows)
    for (double v : r.a) r.norm2 += v * v;
  return F;
}

void project_simplex(double* v, int n) {
  std::vector<double> s(v, v + n);
  std::sort(s.begin(), s.end(), std::greater<>());
  double acc = 0, theta = 0;
  for (int i = 0; i < n; ++i) {
    acc += s[i];
    double t = (acc - 1.0) / (i + 1);
    if (i == n - 1 || s[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (int i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - theta);
}

void project_blocks(const Feasible& F, std::vector<double>& z) {
  for (int u = 0; u < F.nu; ++u) project_simplex(z.data() + u * F.ns, F.ns);
  if (F.na > 0) project_simplex(z.data() + F.nu * F.ns, F.na);
}

// Dykstra's alternating projections onto blocks x rows.
std::vector<double> project(const Feasible& F, const std::vector<double>& v) {
  const int n = F.dim(), m = static_cast<int>(F.rows.size());
  std::vector<double> x = v;
  if (m == 0) {
    project_blocks(F, x);
    return x;
  }
  std::vector<std::vector<double>> p(m + 1, std::vector<double>(n, 0.0));
  std::vector<double> y(n);
  for (int cycle = 0; cycle < 50000; ++cycle) {
    double ch = 0;
    for (int k = 0; k <= m; ++k) {
      for (int i = 0; i < n; ++i) y[i] = x[i] + p[k][i];
      x = y;
      if (k == 0) {
        project_blocks(F, x);
      } else {
        const Row& r = F.rows[k - 1];
        if (r.norm2 > 0) {
          double dot = 0;
          for (int i = 0; i < n; ++i) dot += r.a[i] * x[i];
          double ex = dot - r.b;
          if (r.eq || ex > 0)
            for (int i = 0; i < n; ++i) x[i] -= ex / r.norm2 * r.a[i];
        }
      }
      for (int i = 0; i < n; ++i) {
        const double pk = y[i] - x[i];
        ch = std::max(ch, std::abs(pk - p[k][i]));
        p[k][i] = pk;
      }
    }
    // x can stall for a cycle while the increments still move.
    if (ch < 1e-14) break;
  }
  return x;
}

std::optional<std::vector<double>> lp_point(const Feasible& F) {
  LinearProgram lp(F.dim());
  for (int u = 0; u < F.nu; ++u) {
    std::vector<std::pair<int, double>> row;
    for (int s = 0; s < F.ns; ++s) row.emplace_back(u * F.ns + s, 1.0);
    lp.add_eq(std::move(row), 1.0);
  }
  if (F.na > 0) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < F.na; ++j) row.emplace_back(F.nu * F.ns + j, 1.0);
    lp.add_eq(std::move(row), 1.0);
  }
  for (const auto& r : F.rows) {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < F.dim(); ++i)
      if (r.a[i] != 0) row.emplace_back(i, r.a[i]);
    if (r.eq) lp.add_eq(std::move(row), r.b);
    else lp.add_le(std::move(row), r.b);
  }
  auto res = lp_solve(lp);
  if (!res.feasible()) return std::nullopt;
  return res.x;
}

struct Objective {
  const ObliviousAVC& avc;
  const Dist& P_u;
  const CondDist& Pxu;

  // value and, when g is given, gradient over the U blocks.
  double eval(const std::vector<double>& z, std::vector<double>* g) const {
    const int nu = P_u.size(), nx = avc.nx(), ns = avc.ns(), ny = avc.ny();
    if (g) g->assign(z.size(), 0.0);
    double f = 0;
    std::vector<double> V(static_cast<std::size_t>(nx) * ny), Q(ny);
    for (int u = 0; u < nu; ++u) {
      if (P_u[u] == 0) continue;
      const double* U = z.data() + u * ns;
      std::fill(Q.begin(), Q.end(), 0.0);
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
          double v = 0;
          for (int s = 0; s < ns; ++s) v += std::max(0.0, U[s]) * avc.w(y, x, s);
          V[x * ny + y] = v;
          Q[y] += Pxu(u, x) * v;
        }
      for (int x = 0; x < nx; ++x) {
        const double px = Pxu(u, x);
        if (px == 0) continue;
        for (int y = 0; y < ny; ++y) {
          const double v = V[x * ny + y];
          const double lr = std::log2(std::max(v, kLogFloor) / std::max(Q[y], kLogFloor));
          if (v > 0) f += P_u[u] * px * v * lr;
          if (g)
            for (int s = 0; s < ns; ++s) (*g)[u * ns + s] += P_u[u] * px * avc.w(y, x, s) * lr;
        }
      }
    }
    return f;
  }
};

CondDist rows_of(const std::vector<double>& z, int nu, int ns) {
  std::vector<Dist> rows;
  for (int u = 0; u < nu; ++u) {
    std::vector<double> r(z.begin() + u * ns, z.begin() + (u + 1) * ns);
    double s = 0;
    for (double& v : r) s += (v = std::max(0.0, v));
    for (double& v : r) v /= s;
    rows.emplace_back(std::move(r), 1e-6);
  }
  return CondDist({nu}, std::move(rows));
}

}  // namespace

double conditional_mi(const ObliviousAVC& avc, const Dist& P_u, const CondDist& P_x_given_u, const CondDist& U) {
  if (U.num_rows() != P_u.size() || U.out_size() != avc.ns()) throw ValidationError("conditional_mi: U shape mismatch");
  if (P_x_given_u.num_rows() != P_u.size() || P_x_given_u.out_size() != avc.nx())
    throw ValidationError("conditional_mi: P_{x|u} shape mismatch");
  std::vector<double> z;
  for (const auto& r : U.rows()) z.insert(z.end(), r.pmf().begin(), r.pmf().end());
  return Objective{avc, P_u, P_x_given_u}.eval(z, nullptr);
}

InnerResult inner_min(const ObliviousAVC& avc, const Dist& P_u, const CondDist& P_x_given_u,
                      const InnerOptions& opt) {
  if (P_x_given_u.num_rows() != P_u.size() || P_x_given_u.out_size() != avc.nx())
    throw ValidationError("inner_min: P_{x|u} shape mismatch");
  InnerResult best;
  Feasible F = build_feasible(avc, P_u, opt, best.inner_approximation);
  auto start0 = lp_point(F);
  if (!start0) throw ValidationError("inner_min: state constraint set is infeasible");
  Objective obj{avc, P_u, P_x_given_u};
  Rng g(opt.seed);
  const int n = F.dim();
  best.value = std::numeric_limits<double>::infinity();
  for (int start = 0; start < std::max(1, opt.starts); ++start) {
    std::vector<double> z;
    if (start == 0) {
      z = project(F, *start0);
    } else {
      z.resize(n);
      for (auto& v : z) v = -std::log(1.0 - uniform01(g));
      project_blocks(F, z);
      z = project(F, z);
    }
    std::vector<double> grad, d(n);
    double t = 1.0, f = obj.eval(z, &grad);
    int it = 0, flat = 0;
    for (; it < opt.max_iter; ++it) {
      std::vector<double> zn;
      double fn = f, gd = 0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        std::vector<double> trial(n);
        for (int i = 0; i < n; ++i) trial[i] = z[i] - t * grad[i];
        zn = project(F, trial);
        gd = 0;
        for (int i = 0; i < n; ++i) gd += grad[i] * (zn[i] - z[i]);
        fn = obj.eval(zn, nullptr);
        if (fn <= f + 1e-4 * gd + 1e-15) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      double step = 0;
      for (int i = 0; i < n; ++i) step = std::max(step, std::abs(zn[i] - z[i]));
      flat = f - fn < 1e-15 ? flat + 1 : 0;
      z = std::move(zn);
      f = obj.eval(z, &grad);
      if (step < opt.tol || flat >= 5) break;
      t = std::min(t * 2.0, 1e2);
    }
    if (f < best.value) {
      best.value = f;
      best.U = rows_of(z, F.nu, F.ns);
      best.iterations = it;
    }
  }
  best.P_s.assign(F.ns, 0.0);
  for (int u = 0; u < F.nu; ++u)
    for (int s = 0; s < F.ns; ++s) best.P_s[s] += P_u[u] * best.U(u, s);
  best.value = std::max(0.0, best.value);
  return best;
}

CapacityEstimate capacity_lower_bound(const ObliviousAVC& avc, int L, const SearchConfig& cfg) {
  if (L < 1) throw ValidationError("capacity_lower_bound: L must be >= 1");
  CapacityEstimate est;
  bool any = false;
  for (const auto& P : lambda_x_candidates(avc, cfg.lambda_x_net)) {
    for (const auto& d : decomposition_net(P, L, cfg.sym)) {
      ++est.swept;
      auto v = check_decomposition(avc, d, cfg.sym);
      if (v.answer == Answer::unknown) {
        ++est.undecided;
        continue;
      }
      if (v.answer != Answer::no) continue;
      ++est.admissible;
      double val = inner_min(avc, d.weights, CondDist({d.k()}, d.factors), cfg.inner).value;
      if (!any || val > est.value + 1e-12) {
        est.value = val;
        est.argmax = d;
        any = true;
      }
    }
  }
  est.all_symmetrizable = !any;
  if (!any) est.value = 0;
  return est;
}

SgBounds sarwate_gastpar_bounds(const ObliviousAVC& avc, int L, const SearchConfig& cfg) {
  SgBounds b;
  bool any_up = false, any_lo = false;
  for (const auto& P : lambda_x_candidates(avc, cfg.lambda_x_net)) {
    auto w = check_weak(avc, P, L, cfg.sym);
    auto s = w.answer == Answer::no ? w : check_strong(avc, P, L, cfg.sym);
    const bool up = !s.is_yes(), lo = w.answer == Answer::no;
    if (!up && !lo) continue;
    double val = inner_min(avc, Dist({1.0}), CondDist({1}, {P}), cfg.inner).value;
    if (up && (!any_up || val > b.upper + 1e-12)) {
      b.upper = val;
      b.upper_px = P;
      any_up = true;
    }
    if (lo && (!any_lo || val > b.lower + 1e-12)) {
      b.lower = val;
      b.lower_px = P;
      any_lo = true;
    }
  }
  b.upper_all_symmetrizable = !any_up;
  b.lower_all_symmetrizable = !any_lo;
  return b;
}

double dmc_capacity(const CondDist& W, Dist* argmax, double tol, int max_iter) {
  const int nx = W.num_rows(), ny = W.out_size();
  std::vector<double> p(nx, 1.0 / nx), q(ny), c(nx);
  double lower = 0;
  for (int it = 0; it < max_iter; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) q[y] += p[x] * W(x, y);
    double sum = 0, cmax = 0;
    for (int x = 0; x < nx; ++x) {
      double e = 0;
      for (int y = 0; y < ny; ++y)
        if (W(x, y) > 0) e += W(x, y) * std::log(W(x, y) / q[y]);
      c[x] = std::exp(e);
      sum += p[x] * c[x];
      cmax = std::max(cmax, c[x]);
    }
    lower = std::log2(sum);
    const double upper = std::log2(cmax);
    if (upper - lower < tol) {
      if (argmax) *argmax = Dist(p, 1e-6);
      return std::max(0.0, lower);
    }
    for (int x = 0; x < nx; ++x) p[x] *= c[x] / sum;
  }
  throw ValidationError("dmc_capacity: Blahut-Arimoto did not converge");
}

FadingCapacity fading_capacity(const FadingDMC& f, double tol, int max_iter) {
  if (f.P_u.size() != f.nu) throw ValidationError("fading_capacity: P_u size differs from |U|");
  FadingCapacity r;
  std::vector<Dist> rows;
  for (int u = 0; u < f.nu; ++u) {
    if (f.P_u[u] <= 0) throw ValidationError("fading_capacity: P_u has a zero atom");
    std::vector<Dist> wr;
    for (int x = 0; x < f.nx; ++x) wr.push_back(f.W.row(u * f.nx + x));
    Dist p;
    double c = dmc_capacity(CondDist({f.nx}, std::move(wr)), &p, tol, max_iter);
    r.per_u.push_back(c);
    r.value += f.P_u[u] * c;
    rows.push_back(std::move(p));
  }
  r.P_x_given_u = CondDist({f.nu}, std::move(rows));
  return r;
}

ChainCheck chain_inequality_check(const ObliviousAVC& avc, const Dist& P_u, const CondDist& P_x_given_u,
                                  const JammingKernel& U) {
  const int nu = P_u.size(), nx = avc.nx(), ny = avc.ny(), ns = avc.ns(), L = U.L;
  if (P_x_given_u.num_rows() != nu || P_x_given_u.out_size() != nx)
    throw ValidationError("chain_inequality_check: P_{x|u} shape mismatch");
  if (U.U.out_size() != ns) throw ValidationError("chain_inequality_check: kernel output differs from |S|");
  const long long per_u = ipow(nx, L);
  if (U.U.num_rows() != (U.nu == 1 ? per_u : nu * per_u)) throw ValidationError("chain_inequality_check: kernel shape");
  std::vector<int> shape = {nu, nx};
  std::vector<std::string> axes = {"u", "x"};
  for (int i = 1; i <= L; ++i) {
    shape.push_back(nx);
    axes.push_back("x" + std::to_string(i));
  }
  shape.push_back(ny);
  axes.push_back("y");
  std::vector<double> pmf(static_cast<std::size_t>(nu) * nx * per_u * ny, 0.0);
  std::vector<int> tup, tshape(L, nx);
  for (int u = 0; u < nu; ++u)
    for (int x = 0; x < nx; ++x)
      for (long long t = 0; t < per_u; ++t) {
        unflatten(t, tshape, tup);
        double w = P_u[u] * P_x_given_u(u, x);
        for (int v : tup) w *= P_x_given_u(u, v);
        if (w == 0) continue;
        const int row = static_cast<int>((U.nu == 1 ? 0 : u) * per_u + t);
        for (int y = 0; y < ny; ++y) {
          double py = 0;
          for (int s = 0; s < ns; ++s) py += U.U(row, s) * avc.w(y, x, s);
          pmf[((static_cast<std::size_t>(u) * nx + x) * per_u + t) * ny + y] = w * py;
        }
      }
  JointDist J(shape, axes, std::move(pmf), 1e-7);
  return chain_inequality_check(J, L);
}

ChainCheck chain_inequality_check(const JointDist& P, int L, double tol) {
  std::vector<std::string> xs, given = {"u"};
  for (int i = 1; i <= L; ++i) xs.push_back("x" + std::to_string(i));
  for (const auto& a : xs) given.push_back(a);
  if (mutual_info(P, std::vector<std::string>{"x"}, xs, {"u"}) > tol)
    throw ValidationError("chain_inequality_check: x and x_[L] are not conditionally independent given u");
  ChainCheck c;
  c.conditioned = mutual_info(P, std::vector<std::string>{"x"}, {"y"}, given);
  c.plain = mutual_info(P, "x", "y", "u");
  c.holds = c.conditioned >= c.plain - 1e-9;
  return c;
}

}  // namespace avc
