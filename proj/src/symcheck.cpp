#include "avc/symcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "avc/canonical.hpp"

namespace avc {

const char* to_string(SymMode m) {
  switch (m) {
    case SymMode::oblivious_unique: return "oblivious-unique";
    case SymMode::oblivious_list: return "oblivious-list";
    case SymMode::omniscient: return "omniscient";
    case SymMode::myopic: return "myopic";
  }
  return "?";
}

const char* to_string(Answer a) {
  switch (a) {
    case Answer::yes: return "yes";
    case Answer::no: return "no";
    case Answer::yes_up_to_net: return "yes-up-to-net";
    case Answer::unknown: return "unknown";
  }
  return "?";
}

double SymSystem::residual(const std::vector<double>& U) const {
  double r = 0;
  for (const auto& e : equations) {
    double s = 0;
    for (auto [j, c] : e.coef) s += c * U.at(j);
    r = std::max(r, std::abs(s));
  }
  return r;
}

namespace {

class EquationSet {
 public:
  explicit EquationSet(SymSystem& sys) : sys_(sys) {}

  void add(std::map<int, double>& acc) {
    std::vector<std::pair<int, double>> row;
    double mx = 0;
    for (auto [j, c] : acc)
      if (std::abs(c) > 1e-13) {
        row.emplace_back(j, c);
        mx = std::max(mx, std::abs(c));
      }
    if (row.empty()) return;
    double scale = (row.front().second < 0 ? -1.0 : 1.0) / mx;
    std::vector<std::pair<int, long long>> key;
    for (auto& [j, c] : row) {
      c *= scale;
      key.emplace_back(j, std::llround(c * 1e10));
    }
    if (!seen_.insert(key).second) return;
    sys_.equations.push_back({std::move(row), 0.0});
  }

 private:
  SymSystem& sys_;
  std::set<std::vector<std::pair<int, long long>>> seen_;
};

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

SymSystem build_sym_system(const ObliviousAVC& avc, SymMode mode, int L, int nu, const CondDist* W_zx) {
  SymSystem sys;
  sys.mode = mode;
  sys.nx = avc.nx();
  sys.ns = avc.ns();
  const int nx = avc.nx(), ns = avc.ns(), ny = avc.ny();
  EquationSet eqs(sys);

  if (mode == SymMode::oblivious_unique || mode == SymMode::oblivious_list) {
    if (mode == SymMode::oblivious_unique) {
      L = 1;
      nu = 1;
    }
    if (L < 1 || nu < 1) throw ValidationError("build_sym_system: L and |U| must be >= 1");
    sys.L = L;
    sys.nu = nu;
    if (nu > 1) sys.context_shape.push_back(nu);
    for (int i = 0; i < L; ++i) sys.context_shape.push_back(nx);
    sys.num_contexts = static_cast<int>(nu * ipow(nx, L));
    sys.raw_equations = nu * ipow(nx, L + 1) * ny * factorial(L + 1);
    const long long per_u = ipow(nx, L);
    std::vector<int> perm(L + 1), tup, shape(L + 1, nx);
    const long long tuples = ipow(nx, L + 1);
    for (int u = 0; u < nu; ++u) {
      for (long long f = 0; f < tuples; ++f) {
        unflatten(f, shape, tup);
        if (std::all_of(tup.begin(), tup.end(), [&](int v) { return v == tup[0]; })) continue;
        auto ctx_of = [&](const std::vector<int>& order) {
          long long c = 0;
          for (int k = 1; k <= L; ++k) c = c * nx + tup[order[k]];
          return static_cast<int>(u * per_u + c);
        };
        std::iota(perm.begin(), perm.end(), 0);
        const std::vector<int> ident = perm;
        const int c0 = ctx_of(ident);
        while (std::next_permutation(perm.begin(), perm.end())) {
          const int c1 = ctx_of(perm);
          for (int y = 0; y < ny; ++y) {
            std::map<int, double> acc;
            for (int s = 0; s < ns; ++s) {
              double a = avc.w(y, tup[0], s), b = avc.w(y, tup[perm[0]], s);
              if (a != 0) acc[c0 * ns + s] += a;
              if (b != 0) acc[c1 * ns + s] -= b;
            }
            eqs.add(acc);
          }
        }
      }
    }
  } else if (mode == SymMode::omniscient) {
    sys.L = 1;
    sys.context_shape = {nx, nx};
    sys.num_contexts = nx * nx;
    sys.raw_equations = static_cast<long long>(nx) * nx * ny;
    for (int x = 0; x < nx; ++x)
      for (int xp = 0; xp < nx; ++xp) {
        if (x == xp) continue;
        const int c = x * nx + xp;
        for (int y = 0; y < ny; ++y) {
          std::map<int, double> acc;
          for (int s = 0; s < ns; ++s) acc[c * ns + s] += avc.w(y, x, s) - avc.w(y, xp, s);
          eqs.add(acc);
        }
      }
  } else {
    if (!W_zx || W_zx->num_rows() != nx) throw ValidationError("build_sym_system: myopic mode needs W_{z|x} with |X| rows");
    const int nz = W_zx->out_size();
    sys.L = 1;
    sys.context_shape = {nz, nx};
    sys.num_contexts = nz * nx;
    sys.raw_equations = static_cast<long long>(nx) * nx * ny;
    for (int x = 0; x < nx; ++x)
      for (int xp = 0; xp < nx; ++xp) {
        if (x == xp) continue;
        for (int y = 0; y < ny; ++y) {
          std::map<int, double> acc;
          for (int z = 0; z < nz; ++z)
            for (int s = 0; s < ns; ++s) {
              acc[(z * nx + xp) * ns + s] += (*W_zx)(x, z) * avc.w(y, x, s);
              acc[(z * nx + x) * ns + s] -= (*W_zx)(xp, z) * avc.w(y, xp, s);
            }
          eqs.add(acc);
        }
      }
  }
  return sys;
}

std::vector<double> JammingKernel::flat() const {
  std::vector<double> v;
  for (const auto& r : U.rows()) v.insert(v.end(), r.pmf().begin(), r.pmf().end());
  return v;
}

std::vector<double> induced_state_law(const Dist& P_u, const CondDist& P_x_given_u, const JammingKernel& U) {
  const int nu = P_u.size(), nx = P_x_given_u.out_size(), L = U.L, ns = U.U.out_size();
  if (P_x_given_u.num_rows() != nu) throw ValidationError("jamming_cost: P_{x|u} rows differ from |U|");
  const long long per_u = ipow(nx, L);
  if (U.nu != 1 && U.nu != nu) throw ValidationError("jamming_cost: kernel |U| mismatch");
  if (U.U.num_rows() != U.nu * per_u) throw ValidationError("jamming_cost: kernel context count mismatch");
  std::vector<double> ps(ns, 0.0);
  std::vector<int> tup, shape(L, nx);
  for (int u = 0; u < nu; ++u) {
    if (P_u[u] == 0) continue;
    for (long long f = 0; f < per_u; ++f) {
      unflatten(f, shape, tup);
      double w = P_u[u];
      for (int x : tup) w *= P_x_given_u(u, x);
      if (w == 0) continue;
      const int row = static_cast<int>((U.nu == 1 ? 0 : u) * per_u + f);
      for (int s = 0; s < ns; ++s) ps[s] += w * U.U(row, s);
    }
  }
  return ps;
}

double jamming_cost(const Dist& P_u, const CondDist& P_x_given_u, const JammingKernel& U,
                    std::span<const double> B_row) {
  auto ps = induced_state_law(P_u, P_x_given_u, U);
  if (B_row.size() != ps.size()) throw ValidationError("jamming_cost: B row length differs from |S|");
  double c = 0;
  for (std::size_t s = 0; s < ps.size(); ++s) c += ps[s] * B_row[s];
  return c;
}

std::vector<double> jamming_costs(const Dist& P_u, const CondDist& P_x_given_u, const JammingKernel& U,
                                  const ConstraintPolytope& lambda_s) {
  auto ps = induced_state_law(P_u, P_x_given_u, U);
  std::vector<double> c;
  for (int i = 0; i < lambda_s.rows(); ++i) c.push_back(lambda_s.row_value(i, ps));
  return c;
}

// ---------------------------------------------------------------------------
// Nets

std::vector<CpDecomposition> decomposition_net(const Dist& P_x, int L, const SymOptions& opt) {
  const int nx = P_x.size();
  const int k_max = opt.k_max > 0 ? opt.k_max : nx;
  const int mw = std::max(1, static_cast<int>(std::lround(1.0 / opt.weight_step)));
  std::vector<CpDecomposition> out;
  out.push_back({Dist({1.0}), {P_x}, L});
  auto net = simplex_net(nx, opt.net_resolution);
  const int N = static_cast<int>(net.size());
  for (int k = 2; k <= k_max; ++k) {
    if (mw < k) break;
    for (const auto& wc : compositions(k, mw)) {
      if (std::any_of(wc.begin(), wc.end(), [](int v) { return v == 0; })) continue;
      std::vector<double> w(k);
      for (int i = 0; i < k; ++i) w[i] = static_cast<double>(wc[i]) / mw;
      std::vector<int> idx(k - 1, 0);
      while (true) {
        std::vector<double> last(nx);
        bool ok = true;
        for (int x = 0; x < nx; ++x) {
          double r = P_x[x];
          for (int i = 0; i < k - 1; ++i) r -= w[i] * net[idx[i]][x];
          r /= w[k - 1];
          if (r < -1e-12) ok = false;
          last[x] = std::max(0.0, r);
        }
        if (ok) {
          double s = std::accumulate(last.begin(), last.end(), 0.0);
          for (double& v : last) v /= s;
          std::vector<Dist> f;
          for (int i = 0; i < k - 1; ++i) f.push_back(net[idx[i]]);
          f.emplace_back(last, 1e-7);
          out.push_back({Dist(w), std::move(f), L});
          if (static_cast<long long>(out.size()) > opt.lp_budget)
            throw BudgetExceeded("decomposition net exceeds the LP budget");
        }
        int p = k - 2;
        while (p >= 0 && idx[p] == N - 1) --p;
        if (p < 0) break;
        ++idx[p];
        for (int q = p + 1; q < k - 1; ++q) idx[q] = idx[p];
      }
    }
  }
  return out;
}

std::vector<JointDist> self_coupling_net(const Dist& P_x, int L, double resolution, long long budget) {
  const int nx = P_x.size();
  const int m = net_denominator(nx, resolution);
  auto c = largest_remainder(P_x.pmf(), m);
  bool exact = true;
  for (int x = 0; x < nx; ++x)
    if (std::abs(static_cast<double>(c[x]) / m - P_x[x]) > 1e-12) exact = false;

  std::vector<int> shape(L, nx);
  const long long T = ipow(nx, L);
  std::vector<std::vector<int>> cells(T);
  for (long long f = 0; f < T; ++f) unflatten(f, shape, cells[f]);

  std::vector<std::vector<long long>> tensors;
  std::vector<long long> cur(T, 0);
  std::vector<std::vector<long long>> partial(L, std::vector<long long>(nx, 0));
  auto rec = [&](auto& self, long long f) -> void {
    if (f == T) {
      for (int i = 0; i < L; ++i)
        for (int x = 0; x < nx; ++x)
          if (partial[i][x] != c[x]) return;
      tensors.push_back(cur);
      if (static_cast<long long>(tensors.size()) > budget) throw BudgetExceeded("self-coupling net exceeds budget");
      return;
    }
    long long cap = m;
    for (int i = 0; i < L; ++i) cap = std::min(cap, c[cells[f][i]] - partial[i][cells[f][i]]);
    for (long long v = 0; v <= cap; ++v) {
      cur[f] = v;
      for (int i = 0; i < L; ++i) partial[i][cells[f][i]] += v;
      self(self, f + 1);
      for (int i = 0; i < L; ++i) partial[i][cells[f][i]] -= v;
    }
    cur[f] = 0;
  };
  rec(rec, 0);

  std::vector<JointDist> out;
  std::set<std::vector<long long>> seen;
  auto push = [&](std::vector<double> p) {
    std::vector<long long> key;
    for (double v : p) key.push_back(std::llround(v * 1e9));
    if (!seen.insert(key).second) return;
    out.emplace_back(shape, tuple_axes(L), std::move(p), 1e-7);
  };
  push(tensor_power(P_x, L).pmf());
  for (const auto& t : tensors) {
    std::vector<double> p(T);
    for (long long f = 0; f < T; ++f) p[f] = static_cast<double>(t[f]) / m;
    if (!exact) {
      // l1 projection onto the self-couplings of P_x.
      LinearProgram lp(3 * T);
      lp.objective.assign(3 * T, 0.0);
      for (long long f = 0; f < 2 * T; ++f) lp.objective[T + f] = 1.0;
      for (long long f = 0; f < T; ++f) lp.add_eq({{f, 1.0}, {T + f, -1.0}, {2 * T + f, 1.0}}, p[f]);
      for (int i = 0; i < L; ++i)
        for (int x = 0; x < nx; ++x) {
          std::vector<std::pair<int, double>> row;
          for (long long f = 0; f < T; ++f)
            if (cells[f][i] == x) row.emplace_back(static_cast<int>(f), 1.0);
          lp.add_eq(row, P_x[x]);
        }
      auto r = lp_solve(lp);
      if (!r.feasible()) continue;
      double s = 0;
      for (long long f = 0; f < T; ++f) s += (p[f] = r.x[f]);
      for (double& v : p) v /= s;
    }
    push(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Membership

MembershipResult state_membership(const StateConstraint& c, const std::vector<double>& P_s, int nx, double cp_net,
                                  bool known_cp) {
  MembershipResult r;
  if (c.is_polytope()) {
    for (int i = 0; i < c.polytope.rows(); ++i) {
      double v = c.polytope.row_value(i, P_s);
      if (v > c.polytope.gamma[i] + kNormTol) {
        std::ostringstream os;
        os << "state constraint row " << i << ": cost " << v << " > " << c.polytope.gamma[i];
        r.status = Membership::non_member;
        r.reason = os.str();
        return r;
      }
    }
    r.status = Membership::member;
    return r;
  }
  const int L = c.order;
  JointDist J(std::vector<int>(L, nx), tuple_axes(L), P_s, 1e-7);
  if (!all_marginals_equal(J, c.tol)) {
    r.status = Membership::non_member;
    r.reason = "state law marginals differ, so it is not a self-coupling";
    return r;
  }
  Dist P = axis_marginal(J, 0);
  if (!polytope_contains(P, c.p_set, c.tol)) {
    r.status = Membership::non_member;
    r.reason = "state law marginal lies outside P_set";
    return r;
  }
  if (known_cp) {
    r.status = Membership::member;
    r.reason = "cp by construction";
    return r;
  }
  double asym = asymmetry(J);
  if (asym > c.tol) {
    std::ostringstream os;
    os << "state law is not symmetric (asymmetry " << asym << ")";
    r.status = Membership::non_member;
    r.reason = os.str();
    return r;
  }
  if (auto w = square_witness(J)) {
    std::ostringstream os;
    os << "square copositive witness, <J,Q> = " << w->value;
    r.status = Membership::non_member;
    r.reason = os.str();
    r.witness = w;
    return r;
  }
  CpDistanceOptions dopt;
  dopt.net_resolution = cp_net;
  auto d = distance_to_cp(J, P, dopt);
  if (d.distance <= d.net_error + c.tol) {
    r.status = Membership::member_up_to_net;
    std::ostringstream os;
    os << "distance to cp net hull " << d.distance;
    r.reason = os.str();
    return r;
  }
  if (auto w = copositive_witness(J, P, cp_net)) {
    std::ostringstream os;
    os << "certified copositive witness, <J,Q> = " << w->value << " < " << w->certified_lower;
    r.status = Membership::non_member;
    r.reason = os.str();
    r.witness = w;
    return r;
  }
  r.status = Membership::unknown;
  r.reason = "cp membership undecided at this net resolution";
  return r;
}

// ---------------------------------------------------------------------------
// Kernel LPs

namespace {

struct KernelSolve {
  bool feasible = false;
  std::vector<double> U;
  double infeasibility = 0;
};

KernelSolve solve_kernel(const SymSystem& sys, const std::vector<double>* w, const ConstraintPolytope* ls) {
  const int ns = sys.ns, C = sys.num_contexts;
  LinearProgram lp(sys.num_vars());
  for (const auto& e : sys.equations) lp.eq.push_back(e);
  for (int c = 0; c < C; ++c) {
    std::vector<std::pair<int, double>> row;
    for (int s = 0; s < ns; ++s) row.emplace_back(c * ns + s, 1.0);
    lp.add_eq(std::move(row), 1.0);
  }
  if (ls && w) {
    for (int i = 0; i < ls->rows(); ++i) {
      std::vector<std::pair<int, double>> row;
      for (int c = 0; c < C; ++c) {
        if ((*w)[c] == 0) continue;
        for (int s = 0; s < ns; ++s)
          if (ls->A[i][s] != 0) row.emplace_back(c * ns + s, (*w)[c] * ls->A[i][s]);
      }
      lp.add_le(std::move(row), ls->gamma[i]);
    }
  }
  // When S = X^L, prefer kernels close to the identity map.
  if (ns * sys.nu == C) {
    lp.objective.assign(sys.num_vars(), 0.0);
    for (int c = 0; c < C; ++c) lp.objective[c * ns + c % ns] = -1.0;
  }
  auto r = lp_solve(lp);
  KernelSolve k;
  k.infeasibility = r.infeasibility;
  if (r.status == LpStatus::iteration_limit) throw ValidationError("kernel LP hit the iteration limit");
  if (!r.feasible()) return k;
  k.feasible = true;
  k.U = r.x;
  return k;
}

JammingKernel make_kernel(const SymSystem& sys, const std::vector<double>& x) {
  std::vector<Dist> rows;
  for (int c = 0; c < sys.num_contexts; ++c) {
    std::vector<double> r(x.begin() + c * sys.ns, x.begin() + (c + 1) * sys.ns);
    double s = 0;
    for (double& v : r) s += (v = std::max(0.0, v));
    for (double& v : r) v /= s;
    rows.emplace_back(std::move(r), 1e-6);
  }
  JammingKernel k;
  k.mode = sys.mode;
  k.L = sys.L;
  k.nu = sys.nu;
  k.U = CondDist(sys.context_shape, std::move(rows));
  return k;
}

std::vector<double> decomposition_weights(const CpDecomposition& d) {
  const int nx = d.factors[0].size(), L = d.order;
  const long long per_u = ipow(nx, L);
  std::vector<double> w;
  w.reserve(d.k() * per_u);
  for (int u = 0; u < d.k(); ++u) {
    auto t = tensor_power(d.factors[u], L).pmf();
    for (double v : t) w.push_back(d.weights[u] * v);
  }
  return w;
}

void charge(SymVerdict& v, const SymOptions& opt) {
  if (++v.lp_count > opt.lp_budget) throw BudgetExceeded("symmetrizability check exceeded its LP budget");
}

void attach_witness(SymVerdict& v, const ObliviousAVC& avc, JammingKernel k, const SymSystem& sys,
                    const Dist& P_u, const CondDist& Pxu) {
  v.residual = sys.residual(k.flat());
  if (avc.lambda_s.is_polytope()) v.costs = jamming_costs(P_u, Pxu, k, avc.lambda_s.polytope);
  v.witness = std::move(k);
}

void require_input(const ObliviousAVC& avc, const Dist& P_x, int L) {
  if (L < 1) throw ValidationError("list size L must be >= 1");
  if (P_x.size() != avc.nx()) throw ValidationError("P_x size differs from |X|");
  if (!polytope_contains(P_x, avc.lambda_x, 1e-9)) throw ValidationError("P_x is not in lambda_x");
}

const ConstraintPolytope& require_polytope(const ObliviousAVC& avc) {
  if (!avc.lambda_s.is_polytope())
    throw UnsupportedConstraint("lambda_s is a cp-union; LP checks need a polytope state constraint");
  return avc.lambda_s.polytope;
}

Dist one_point() { return Dist({1.0}); }

CondDist single_row(const Dist& P) { return CondDist({1}, {P}); }

// Shared NO for a system with no row-stochastic solution at all.
std::optional<SymVerdict> infeasible_system(const ObliviousAVC& avc, int L, const std::string& notion,
                                            const SymOptions& opt) {
  SymVerdict v;
  v.notion = notion;
  v.L = L;
  auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
  charge(v, opt);
  auto k = solve_kernel(sys, nullptr, nullptr);
  if (k.feasible) return std::nullopt;
  v.answer = Answer::no;
  v.infeasibility = k.infeasibility;
  std::ostringstream os;
  os << "symmetrization system at L=" << L << " has no stochastic solution (phase-1 residual " << k.infeasibility
     << ")";
  v.certificate = os.str();
  return v;
}

std::optional<int> fast_order(const ObliviousAVC& avc, const SymOptions& opt) {
  if (!opt.fast_path) return std::nullopt;
  return canonical_order(avc);
}

// Canonical channel at its own order with a cp-union lambda_s: every kernel
// reorders the context, so the reachable state laws are those with the orbit
// sums of the input law, and the only symmetric one is its orbit average.
bool identity_forced(const ObliviousAVC& avc, int L, SymVerdict& v) {
  if (avc.lambda_s.is_polytope()) return false;
  auto sr = verify_sym_singleton(avc, L);
  v.lp_count += sr.lp_count;
  return sr.kind == SingletonKind::singleton_identity || sr.kind == SingletonKind::reorderings;
}

SymVerdict weak_generic(const ObliviousAVC& avc, const Dist& P_x, int L, const SymOptions& opt) {
  SymVerdict v;
  v.notion = "weak";
  v.L = L;
  const auto& ls = require_polytope(avc);
  auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
  auto w = tensor_power(P_x, L).pmf();
  charge(v, opt);
  auto k = solve_kernel(sys, &w, &ls);
  if (!k.feasible) {
    v.answer = Answer::no;
    v.infeasibility = k.infeasibility;
    v.coupling = tensor_power(P_x, L);
    v.decomposition = CpDecomposition{one_point(), {P_x}, L};
    std::ostringstream os;
    os << "no symmetrizing kernel meets the cost bounds under P_x^L (phase-1 residual " << k.infeasibility << ")";
    v.certificate = os.str();
    return v;
  }
  v.answer = Answer::yes;
  v.certificate = "LP-feasible symmetrizing kernel under P_x^L";
  attach_witness(v, avc, make_kernel(sys, k.U), sys, one_point(), single_row(P_x));
  return v;
}

}  // namespace

SymVerdict check_weak(const ObliviousAVC& avc, const Dist& P_x, int L, const SymOptions& opt) {
  require_input(avc, P_x, L);
  if (auto no = infeasible_system(avc, L, "weak", opt)) return *no;
  if (auto Lc = fast_order(avc, opt)) {
    SymVerdict v;
    v.notion = "weak";
    v.L = L;
    v.lp_count = 1;
    if (L == *Lc && identity_forced(avc, L, v)) {
      auto ps = tensor_power(P_x, L).pmf();
      auto m = state_membership(avc.lambda_s, ps, avc.nx(), opt.cp_net, true);
      auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
      if (m.status == Membership::non_member) {
        v.answer = Answer::no;
        v.coupling = tensor_power(P_x, L);
        v.decomposition = CpDecomposition{one_point(), {P_x}, L};
        v.certificate = "every symmetrizing kernel reorders the context; its state law P_x^L fails: " + m.reason;
        return v;
      }
      v.answer = m.status == Membership::member ? Answer::yes : Answer::yes_up_to_net;
      v.resolution = m.status == Membership::member ? 0 : opt.cp_net;
      v.certificate = "identity kernel; state law P_x^L";
      attach_witness(v, avc, identity_kernel(avc.nx(), L), sys, one_point(), single_row(P_x));
      return v;
    }
    if (L < *Lc && !avc.lambda_s.is_polytope()) {
      if (!polytope_contains(P_x, avc.lambda_s.p_set, avc.lambda_s.tol)) {
        v.answer = Answer::unknown;
        v.certificate = "no closed form below the canonical order for P_x outside P_set";
        return v;
      }
      auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
      v.answer = Answer::yes;
      v.certificate = "padded identity kernel; state law P_x^L' with L' the canonical order";
      attach_witness(v, avc, padded_identity_kernel(P_x, L, *Lc), sys, one_point(), single_row(P_x));
      return v;
    }
  }
  return weak_generic(avc, P_x, L, opt);
}

namespace {

SymVerdict rename(SymVerdict v, const std::string& notion, const std::string& why) {
  v.notion = notion;
  if (!why.empty()) v.certificate = why + ": " + v.certificate;
  return v;
}

}  // namespace

SymVerdict check_cp(const ObliviousAVC& avc, const Dist& P_x, int L, const SymOptions& opt) {
  require_input(avc, P_x, L);
  if (L == 1) return rename(check_weak(avc, P_x, L, opt), "cp", "order 1: cp coincides with weak");
  if (auto no = infeasible_system(avc, L, "cp", opt)) return *no;
  SymVerdict v;
  v.notion = "cp";
  v.L = L;
  v.lp_count = 1;
  auto Lc = fast_order(avc, opt);
  if (Lc && L == *Lc && identity_forced(avc, L, v)) {
    auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
    if (!avc.lambda_s.is_polytope()) {
      if (!polytope_contains(P_x, avc.lambda_s.p_set, avc.lambda_s.tol)) {
        v.answer = Answer::no;
        v.decomposition = CpDecomposition{one_point(), {P_x}, L};
        v.coupling = tensor_power(P_x, L);
        v.certificate = "every symmetrizing kernel reorders the context; P_x lies outside P_set";
        return v;
      }
      v.answer = Answer::yes;
      v.certificate = "identity kernel for every decomposition; its state law is the decomposition's cp law";
      attach_witness(v, avc, identity_kernel(avc.nx(), L), sys, one_point(), single_row(P_x));
      return v;
    }
    for (const auto& d : decomposition_net(P_x, L, opt)) {
      JointDist J = cp_synthesize(d);
      auto m = state_membership(avc.lambda_s, J.pmf(), avc.nx(), opt.cp_net, true);
      if (m.status == Membership::non_member) {
        v.answer = Answer::no;
        v.decomposition = d;
        v.coupling = J;
        v.certificate = "every symmetrizing kernel reorders the context; decomposition's cp law fails: " + m.reason;
        v.witness.reset();
        return v;
      }
    }
    v.answer = Answer::yes_up_to_net;
    v.resolution = opt.net_resolution;
    v.certificate = "identity kernel meets the constraint on every swept decomposition";
    attach_witness(v, avc, identity_kernel(avc.nx(), L), sys, one_point(), single_row(P_x));
    return v;
  }
  if (Lc && L < *Lc && !avc.lambda_s.is_polytope()) {
    if (!polytope_contains(P_x, avc.lambda_s.p_set, avc.lambda_s.tol)) {
      v.answer = Answer::unknown;
      v.certificate = "no closed form below the canonical order for P_x outside P_set";
      return v;
    }
    auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
    v.answer = Answer::yes;
    v.certificate = "per-u padded identity kernel delta(x_[L]) x P_{x|u}^(L'-L) for every decomposition";
    attach_witness(v, avc, padded_identity_kernel(P_x, L, *Lc), sys, one_point(), single_row(P_x));
    return v;
  }

  const auto& ls = require_polytope(avc);
  std::map<int, SymSystem> systems;
  std::optional<JammingKernel> first;
  std::optional<SymSystem> first_sys;
  for (const auto& d : decomposition_net(P_x, L, opt)) {
    auto it = systems.find(d.k());
    if (it == systems.end()) it = systems.emplace(d.k(), build_sym_system(avc, SymMode::oblivious_list, L, d.k())).first;
    auto w = decomposition_weights(d);
    charge(v, opt);
    auto k = solve_kernel(it->second, &w, &ls);
    if (!k.feasible) {
      v.answer = Answer::no;
      v.decomposition = d;
      v.coupling = cp_synthesize(d);
      v.infeasibility = k.infeasibility;
      std::ostringstream os;
      os << "decomposition with " << d.k() << " factor(s) admits no per-u symmetrizing kernel within the cost bounds"
         << " (phase-1 residual " << k.infeasibility << ")";
      v.certificate = os.str();
      return v;
    }
    if (!first) {
      first = make_kernel(it->second, k.U);
      first_sys = it->second;
    }
  }
  v.answer = Answer::yes_up_to_net;
  v.resolution = opt.net_resolution;
  v.certificate = "every swept decomposition admits a kernel; witness shown for the trivial decomposition";
  attach_witness(v, avc, *first, *first_sys, one_point(), single_row(P_x));
  return v;
}

SymVerdict check_strong(const ObliviousAVC& avc, const Dist& P_x, int L, const SymOptions& opt) {
  require_input(avc, P_x, L);
  if (L == 1) return rename(check_weak(avc, P_x, L, opt), "strong", "order 1: the only self-coupling is P_x");
  if (auto no = infeasible_system(avc, L, "strong", opt)) return *no;
  SymVerdict v;
  v.notion = "strong";
  v.L = L;
  v.lp_count = 1;
  auto Lc = fast_order(avc, opt);
  auto net = self_coupling_net(P_x, L, opt.net_resolution);
  if (Lc && L == *Lc && identity_forced(avc, L, v)) {
    auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
    bool undecided = false;
    bool up_to_net = false;
    for (const auto& J : net) {
      auto m = state_membership(avc.lambda_s, symmetrize(J).pmf(), avc.nx(), opt.cp_net, false);
      if (m.status == Membership::non_member) {
        v.answer = Answer::no;
        v.coupling = J;
        v.certificate = "every symmetrizing kernel reorders the context; orbit average of self-coupling J fails: " +
                        m.reason;
        return v;
      }
      if (m.status == Membership::unknown) undecided = true;
      if (m.status == Membership::member_up_to_net) up_to_net = true;
    }
    if (undecided) {
      v.answer = Answer::unknown;
      v.certificate = "some self-couplings could not be placed in or out of the cp cone at this resolution";
      return v;
    }
    (void)up_to_net;
    v.answer = Answer::yes_up_to_net;
    v.resolution = opt.net_resolution;
    v.certificate = "identity kernel meets the constraint on every self-coupling of the net";
    attach_witness(v, avc, identity_kernel(avc.nx(), L), sys, one_point(), single_row(P_x));
    return v;
  }
  if (Lc && L < *Lc && !avc.lambda_s.is_polytope()) {
    v.answer = Answer::unknown;
    v.certificate = "no closed form for strong symmetrizability strictly between 1 and the canonical order";
    return v;
  }

  const auto& ls = require_polytope(avc);
  auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
  std::optional<JammingKernel> first;
  for (const auto& J : net) {
    charge(v, opt);
    auto k = solve_kernel(sys, &J.pmf(), &ls);
    if (!k.feasible) {
      v.answer = Answer::no;
      v.coupling = J;
      v.infeasibility = k.infeasibility;
      std::ostringstream os;
      os << "self-coupling J admits no symmetrizing kernel within the cost bounds (phase-1 residual "
         << k.infeasibility << ")";
      v.certificate = os.str();
      return v;
    }
    if (!first) first = make_kernel(sys, k.U);
  }
  v.answer = Answer::yes_up_to_net;
  v.resolution = opt.net_resolution;
  v.certificate = "every self-coupling of the net admits a kernel; witness shown for P_x^L";
  attach_witness(v, avc, *first, sys, one_point(), single_row(P_x));
  return v;
}

SymVerdict check_decomposition(const ObliviousAVC& avc, const CpDecomposition& d, const SymOptions& opt) {
  const int L = d.order;
  const Dist P_x = d.marginal();
  if (L < 1) throw ValidationError("list size L must be >= 1");
  if (P_x.size() != avc.nx()) throw ValidationError("decomposition alphabet differs from |X|");
  if (auto no = infeasible_system(avc, L, "decomposition", opt)) return *no;
  SymVerdict v;
  v.notion = "decomposition";
  v.L = L;
  v.decomposition = d;
  v.coupling = cp_synthesize(d);
  CondDist Pxu({d.k()}, d.factors);
  if (!avc.lambda_s.is_polytope()) {
    auto Lc = fast_order(avc, opt);
    if (!Lc || L > *Lc) throw UnsupportedConstraint("lambda_s is a cp-union; LP checks need a polytope state constraint");
    const bool inside = polytope_contains(P_x, avc.lambda_s.p_set, avc.lambda_s.tol);
    if (L == *Lc && identity_forced(avc, L, v)) {
      v.answer = inside ? Answer::yes : Answer::no;
      v.certificate = inside ? "identity kernel; state law is the cp law"
                             : "every symmetrizing kernel reorders the context; cp law marginal lies outside P_set";
      if (inside) v.witness = identity_kernel(avc.nx(), L);
      return v;
    }
    if (L < *Lc && inside) {
      v.answer = Answer::yes;
      v.certificate = "per-u padded identity kernel; state law is the order-Lc cp law";
      return v;
    }
    v.answer = Answer::unknown;
    v.certificate = "no closed form for this decomposition";
    return v;
  }
  auto sys = build_sym_system(avc, SymMode::oblivious_list, L, d.k());
  auto w = decomposition_weights(d);
  charge(v, opt);
  auto k = solve_kernel(sys, &w, &avc.lambda_s.polytope);
  if (!k.feasible) {
    v.answer = Answer::no;
    v.infeasibility = k.infeasibility;
    std::ostringstream os;
    os << "no per-u symmetrizing kernel within the cost bounds (phase-1 residual " << k.infeasibility << ")";
    v.certificate = os.str();
    return v;
  }
  v.answer = Answer::yes;
  v.certificate = "LP-feasible per-u symmetrizing kernel";
  attach_witness(v, avc, make_kernel(sys, k.U), sys, d.weights, Pxu);
  return v;
}

std::vector<Dist> lambda_x_candidates(const ObliviousAVC& avc, double eta) {
  const int nx = avc.nx();
  const auto& K = avc.lambda_x;
  std::vector<Dist> out;
  std::set<std::vector<long long>> seen;
  for (const auto& q : simplex_net(nx, eta)) {
    LinearProgram lp(3 * nx);
    lp.objective.assign(3 * nx, 0.0);
    for (int x = 0; x < 2 * nx; ++x) lp.objective[nx + x] = 1.0;
    std::vector<std::pair<int, double>> sum;
    for (int x = 0; x < nx; ++x) {
      sum.emplace_back(x, 1.0);
      lp.add_eq({{x, 1.0}, {nx + x, -1.0}, {2 * nx + x, 1.0}}, q[x]);
    }
    lp.add_eq(sum, 1.0);
    for (int i = 0; i < K.rows(); ++i) {
      std::vector<std::pair<int, double>> row;
      for (int x = 0; x < nx; ++x)
        if (K.A[i][x] != 0) row.emplace_back(x, K.A[i][x]);
      lp.add_le(row, K.gamma[i]);
    }
    auto r = lp_solve(lp);
    if (!r.feasible()) throw ValidationError("lambda_x is empty");
    std::vector<double> p(r.x.begin(), r.x.begin() + nx);
    double s = 0;
    for (double& v : p) s += (v = std::max(0.0, v));
    std::vector<long long> key;
    for (double& v : p) {
      v /= s;
      if (std::abs(v) < 1e-12) v = 0;
      key.push_back(std::llround(v * 1e9));
    }
    if (!seen.insert(key).second) continue;
    out.emplace_back(p, 1e-7);
  }
  return out;
}

SymProfile symmetrizability_profile(const ObliviousAVC& avc, const std::optional<Dist>& P_x, int L_max,
                                    const SymOptions& opt, double lambda_x_net) {
  if (L_max < 1) throw ValidationError("profile: L_max must be >= 1");
  SymProfile prof;
  prof.L_max = L_max;
  std::vector<Dist> cands = P_x ? std::vector<Dist>{*P_x} : lambda_x_candidates(avc, lambda_x_net);
  for (const auto& p : cands) {
    ProfileEntry e;
    e.P_x = p;
    for (int L = 1; L <= L_max; ++L) {
      SymVerdict w = check_weak(avc, p, L, opt);
      SymVerdict c = w.answer == Answer::no ? rename(w, "cp", "inherited from weak NO (trivial decomposition)")
                                             : check_cp(avc, p, L, opt);
      SymVerdict s = c.answer == Answer::no ? rename(c, "strong", "inherited from cp NO (u-free kernel on its cp law)")
                                             : check_strong(avc, p, L, opt);
      if (w.is_yes()) e.weak = L;
      if (c.is_yes()) e.cp = L;
      if (s.is_yes()) e.strong = L;
      e.verdicts.push_back(std::move(w));
      e.verdicts.push_back(std::move(c));
      e.verdicts.push_back(std::move(s));
    }
    prof.entries.push_back(std::move(e));
  }
  auto argmin = [&](auto get) {
    int best = 0;
    for (std::size_t i = 1; i < prof.entries.size(); ++i)
      if (get(prof.entries[i]) < get(prof.entries[best])) best = static_cast<int>(i);
    return best;
  };
  prof.argmin_strong = argmin([](const ProfileEntry& e) { return e.strong; });
  prof.argmin_cp = argmin([](const ProfileEntry& e) { return e.cp; });
  prof.argmin_weak = argmin([](const ProfileEntry& e) { return e.weak; });
  prof.strong = prof.entries[prof.argmin_strong].strong;
  prof.cp = prof.entries[prof.argmin_cp].cp;
  prof.weak = prof.entries[prof.argmin_weak].weak;
  return prof;
}

}  // namespace avc
