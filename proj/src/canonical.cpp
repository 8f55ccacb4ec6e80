#include "avc/canonical.hpp"

#include <algorithm>
#include <cmath>

#include "avc/lp.hpp"

namespace avc {

namespace {

long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool polytope_nonempty(const ConstraintPolytope& K) {
  LinearProgram lp(K.dim);
  std::vector<std::pair<int, double>> sum;
  for (int x = 0; x < K.dim; ++x) sum.emplace_back(x, 1.0);
  lp.add_eq(sum, 1.0);
  for (int i = 0; i < K.rows(); ++i) {
    std::vector<std::pair<int, double>> row;
    for (int x = 0; x < K.dim; ++x)
      if (K.A[i][x] != 0) row.emplace_back(x, K.A[i][x]);
    lp.add_le(row, K.gamma[i]);
  }
  return lp_solve(lp).feasible();
}

ObliviousAVC canonical_skeleton(int nx, int L) {
  if (nx < 1) throw ValidationError("canonical: |X| must be >= 1");
  if (L < 1) throw ValidationError("canonical: L must be >= 1");
  const int ns = static_cast<int>(ipow(nx, L));
  const int ny = static_cast<int>(binom(nx + L, L + 1));
  std::vector<int> shape(L, nx), tup;
  std::vector<double> flat(static_cast<std::size_t>(nx) * ns * ny, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int s = 0; s < ns; ++s) {
      unflatten(s, shape, tup);
      std::vector<int> all = {x};
      all.insert(all.end(), tup.begin(), tup.end());
      flat[(static_cast<std::size_t>(x) * ns + s) * ny + canonical_output_index(nx, all)] = 1.0;
    }
  ObliviousAVC a;
  a.X = Alphabet(nx);
  a.S = Alphabet(ns);
  a.Y = Alphabet(ny);
  a.W = CondDist({nx, ns}, ny, std::move(flat));
  return a;
}

}  // namespace

int canonical_output_index(int nx, std::vector<int> symbols) {
  std::sort(symbols.begin(), symbols.end());
  auto ms = sorted_multisets(nx, static_cast<int>(symbols.size()));
  auto it = std::lower_bound(ms.begin(), ms.end(), symbols);
  if (it == ms.end() || *it != symbols) throw ValidationError("canonical_output_index: symbol out of range");
  return static_cast<int>(it - ms.begin());
}

ObliviousAVC build_canonical(const ConstraintPolytope& P_set, int L) {
  if (!polytope_nonempty(P_set)) throw ValidationError("canonical: P_set is empty");
  ObliviousAVC a = canonical_skeleton(P_set.dim, L);
  a.lambda_x = P_set;
  a.lambda_s = StateConstraint::cp_union(P_set, L);
  a.validate();
  return a;
}

ObliviousAVC build_canonical_singleton(const Dist& P_x, int L) {
  ObliviousAVC a = canonical_skeleton(P_x.size(), L);
  a.lambda_x = ConstraintPolytope::singleton(P_x);
  a.lambda_s = StateConstraint::from_polytope(ConstraintPolytope::singleton(Dist(tensor_power(P_x, L).pmf())));
  a.validate();
  return a;
}

std::optional<int> canonical_order(const ObliviousAVC& avc) {
  const int nx = avc.nx();
  if (nx < 2) return std::nullopt;
  int L = 1;
  long long s = nx;
  while (s < avc.ns()) {
    s *= nx;
    ++L;
  }
  if (s != avc.ns()) return std::nullopt;
  if (avc.ny() != binom(nx + L, L + 1)) return std::nullopt;
  std::vector<int> shape(L, nx), tup;
  for (int x = 0; x < nx; ++x)
    for (int st = 0; st < avc.ns(); ++st) {
      unflatten(st, shape, tup);
      std::vector<int> all = {x};
      all.insert(all.end(), tup.begin(), tup.end());
      int y = canonical_output_index(nx, all);
      if (std::abs(avc.w(y, x, st) - 1.0) > 1e-12) return std::nullopt;
    }
  return L;
}

JammingKernel identity_kernel(int nx, int L) {
  const int ns = static_cast<int>(ipow(nx, L));
  std::vector<Dist> rows;
  for (int c = 0; c < ns; ++c) rows.push_back(Dist::point(ns, c));
  JammingKernel k;
  k.L = L;
  k.nu = 1;
  k.U = CondDist(std::vector<int>(L, nx), std::move(rows));
  return k;
}

JammingKernel padded_identity_kernel(const Dist& P, int Lq, int L) {
  if (Lq < 1 || Lq > L) throw ValidationError("padded_identity_kernel: need 1 <= Lq <= L");
  const int nx = P.size();
  const long long ctx = ipow(nx, Lq), pad = ipow(nx, L - Lq);
  auto tail = L > Lq ? tensor_power(P, L - Lq).pmf() : std::vector<double>{1.0};
  std::vector<Dist> rows;
  for (long long c = 0; c < ctx; ++c) {
    std::vector<double> r(static_cast<std::size_t>(ctx * pad), 0.0);
    for (long long t = 0; t < pad; ++t) r[c * pad + t] = tail[t];
    rows.emplace_back(std::move(r), 1e-9);
  }
  JammingKernel k;
  k.L = Lq;
  k.nu = 1;
  k.U = CondDist(std::vector<int>(Lq, nx), std::move(rows));
  return k;
}

const char* to_string(SingletonKind k) {
  switch (k) {
    case SingletonKind::singleton_identity: return "singleton-identity";
    case SingletonKind::singleton_other: return "singleton-other";
    case SingletonKind::reorderings: return "identity-up-to-reordering";
    case SingletonKind::empty: return "empty";
    case SingletonKind::other: return "other";
  }
  return "?";
}

SingletonResult verify_sym_singleton(const ObliviousAVC& avc, int L) {
  SingletonResult r;
  auto sys = build_sym_system(avc, SymMode::oblivious_list, L, 1);
  r.equations = static_cast<int>(sys.equations.size());
  const int ns = sys.ns, C = sys.num_contexts, V = sys.num_vars();
  LinearProgram base(V);
  for (const auto& e : sys.equations) base.eq.push_back(e);
  for (int c = 0; c < C; ++c) {
    std::vector<std::pair<int, double>> row;
    for (int s = 0; s < ns; ++s) row.emplace_back(c * ns + s, 1.0);
    base.add_eq(std::move(row), 1.0);
  }
  auto to_kernel = [&](const std::vector<double>& x) {
    std::vector<Dist> rows;
    for (int c = 0; c < C; ++c) {
      std::vector<double> row(x.begin() + c * ns, x.begin() + (c + 1) * ns);
      double s = 0;
      for (double& v : row) s += (v = std::max(0.0, v));
      for (double& v : row) v /= s;
      rows.emplace_back(std::move(row), 1e-6);
    }
    JammingKernel k;
    k.L = sys.L;
    k.U = CondDist(sys.context_shape, std::move(rows));
    return k;
  };
  ++r.lp_count;
  auto feas = lp_solve(base);
  if (!feas.feasible()) {
    r.kind = SingletonKind::empty;
    return r;
  }
  if (sys.equations.empty()) {
    r.kind = SingletonKind::other;
    r.witness = to_kernel(feas.x);
    return r;
  }
  // A variable whose maximum is 0 is forced to zero.
  std::vector<char> free_var(V, 0);
  for (int v = 0; v < V; ++v) {
    LinearProgram lp = base;
    lp.objective.assign(V, 0.0);
    lp.objective[v] = -1.0;
    ++r.lp_count;
    auto res = lp_solve(lp);
    free_var[v] = res.feasible() && -res.value > 1e-9;
  }
  std::vector<double> point(V, 0.0);
  bool single = true, identity = ns == C;
  for (int c = 0; c < C && single; ++c) {
    int cnt = 0, at = -1;
    for (int s = 0; s < ns; ++s)
      if (free_var[c * ns + s]) {
        ++cnt;
        at = s;
      }
    if (cnt != 1) single = false;
    else {
      point[c * ns + at] = 1.0;
      if (at != c) identity = false;
    }
  }
  if (!single && ns == C) {
    std::vector<int> shape(sys.L, sys.nx), ct, st;
    bool closed = true;
    for (int c = 0; c < C && closed; ++c) {
      unflatten(c, shape, ct);
      std::sort(ct.begin(), ct.end());
      closed = free_var[c * ns + c];
      for (int s = 0; s < ns && closed; ++s) {
        if (!free_var[c * ns + s]) continue;
        unflatten(s, shape, st);
        std::sort(st.begin(), st.end());
        closed = st == ct;
      }
    }
    if (closed) {
      r.kind = SingletonKind::reorderings;
      r.witness = identity_kernel(sys.nx, sys.L);
      return r;
    }
  }
  if (!single) {
    r.kind = SingletonKind::other;
    r.witness = to_kernel(feas.x);
    return r;
  }
  r.kind = identity ? SingletonKind::singleton_identity : SingletonKind::singleton_other;
  r.witness = to_kernel(point);
  return r;
}

ConstraintPolytope demo_pset() { return ConstraintPolytope(2, {{0.0, 1.0}}, {0.3}); }

SeparationReport separation_demo(const ConstraintPolytope& P_set, int L, const SymOptions& opt,
                                 std::optional<Dist> singleton_px) {
  SeparationReport rep;
  ObliviousAVC main = build_canonical(P_set, L);
  rep.at_L = verify_sym_singleton(main, L);
  rep.at_L_plus_1 = verify_sym_singleton(main, L + 1);
  rep.main = symmetrizability_profile(main, std::nullopt, L + 1, opt);
  if (!singleton_px) {
    // Most interior candidate: largest minimum coordinate, first on ties.
    auto cands = lambda_x_candidates(main, 0.1);
    int best = 0;
    auto minc = [](const Dist& d) { return *std::min_element(d.pmf().begin(), d.pmf().end()); };
    for (std::size_t i = 1; i < cands.size(); ++i)
      if (minc(cands[i]) > minc(cands[best]) + 1e-12) best = static_cast<int>(i);
    singleton_px = cands[best];
  }
  rep.singleton_px = *singleton_px;
  ObliviousAVC single = build_canonical_singleton(*singleton_px, L);
  rep.singleton = symmetrizability_profile(single, std::nullopt, L + 1, opt);
  rep.strong_below = rep.main.strong < rep.main.cp && rep.main.cp == L && rep.main.weak == L;
  rep.cp_below = rep.singleton.cp < rep.singleton.weak && rep.singleton.weak == L;
  return rep;
}

}  // namespace avc
