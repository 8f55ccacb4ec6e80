#include "avc/cpcone.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "avc/lp.hpp"

namespace avc {

Dist CpDecomposition::marginal() const {
  if (factors.empty()) throw ValidationError("CpDecomposition: no factors");
  std::vector<double> m(factors[0].size(), 0.0);
  for (int i = 0; i < k(); ++i)
    for (int x = 0; x < factors[i].size(); ++x) m[x] += weights[i] * factors[i][x];
  return Dist(m, 1e-7);
}

std::vector<std::string> tuple_axes(int L) {
  std::vector<std::string> a;
  for (int i = 1; i <= L; ++i) a.push_back("x" + std::to_string(i));
  return a;
}

JointDist tensor_power(const Dist& p, int L) {
  return JointDist::product(std::vector<Dist>(L, p), tuple_axes(L));
}

JointDist cp_synthesize(const CpDecomposition& d) {
  if (static_cast<int>(d.factors.size()) != d.k()) throw ValidationError("CpDecomposition: weights/factors mismatch");
  if (d.order < 1) throw ValidationError("CpDecomposition: order must be >= 1");
  const int nx = d.factors.at(0).size();
  std::vector<double> acc(static_cast<std::size_t>(ipow(nx, d.order)), 0.0);
  for (int i = 0; i < d.k(); ++i) {
    if (d.weights[i] == 0) continue;
    if (d.factors[i].size() != nx) throw ValidationError("CpDecomposition: factor sizes differ");
    JointDist t = tensor_power(d.factors[i], d.order);
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += d.weights[i] * t.pmf()[c];
  }
  return JointDist(std::vector<int>(d.order, nx), tuple_axes(d.order), std::move(acc), 1e-7);
}

std::vector<std::vector<int>> sorted_multisets(int nx, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(size, 0);
  auto rec = [&](auto& self, int pos, int lo) -> void {
    if (pos == size) {
      out.push_back(cur);
      return;
    }
    for (int v = lo; v < nx; ++v) {
      cur[pos] = v;
      self(self, pos + 1, v);
    }
  };
  rec(rec, 0, 0);
  return out;
}

Dist axis_marginal(const JointDist& J, int i) {
  return J.marginal({J.axes().at(i)}).to_dist();
}

bool all_marginals_equal(const JointDist& J, double tol) {
  Dist m0 = axis_marginal(J, 0);
  for (int i = 1; i < J.rank(); ++i)
    if (l1_distance(axis_marginal(J, i).pmf(), m0.pmf()) > tol) return false;
  return true;
}

namespace {

std::vector<std::vector<int>> all_permutations(int L) {
  std::vector<int> p(L);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Index of the cell obtained by permuting the axes of `cell` by pi.
long long permuted_index(const std::vector<int>& cell, const std::vector<int>& pi, int nx) {
  long long f = 0;
  for (std::size_t k = 0; k < pi.size(); ++k) f = f * nx + cell[pi[k]];
  return f;
}

void require_cube(const JointDist& J) {
  for (int s : J.shape())
    if (s != J.shape()[0]) throw ValidationError("expected a joint law over X^L");
}

}  // namespace

double asymmetry(const JointDist& J) {
  require_cube(J);
  const int nx = J.shape()[0], L = J.rank();
  double a = 0;
  std::vector<int> cell;
  auto perms = all_permutations(L);
  for (std::size_t f = 0; f < J.numel(); ++f) {
    unflatten(static_cast<long long>(f), J.shape(), cell);
    for (const auto& pi : perms) a = std::max(a, std::abs(J.pmf()[f] - J.pmf()[permuted_index(cell, pi, nx)]));
  }
  return a;
}

JointDist symmetrize(const JointDist& J) {
  require_cube(J);
  const int nx = J.shape()[0], L = J.rank();
  auto perms = all_permutations(L);
  std::vector<double> out(J.numel(), 0.0);
  std::vector<int> cell;
  for (std::size_t f = 0; f < J.numel(); ++f) {
    unflatten(static_cast<long long>(f), J.shape(), cell);
    double s = 0;
    for (const auto& pi : perms) s += J.pmf()[permuted_index(cell, pi, nx)];
    out[f] = s / static_cast<double>(perms.size());
  }
  return JointDist(J.shape(), J.axes(), std::move(out), 1e-7);
}

CpDistance distance_to_cp(const JointDist& J, const Dist& P_x, const CpDistanceOptions& opt) {
  require_cube(J);
  const int nx = J.shape()[0], L = J.rank();
  if (P_x.size() != nx) throw ValidationError("distance_to_cp: P_x size differs from |X|");
  std::vector<Dist> atoms;
  for (auto& a : simplex_net(nx, opt.net_resolution))
    if (l1_distance(a.pmf(), P_x.pmf()) <= opt.atom_radius + 1e-12) atoms.push_back(std::move(a));
  atoms.push_back(P_x);
  for (const auto& a : opt.extra_atoms)
    if (a.size() == nx) atoms.push_back(a);
  if (atoms.empty()) throw ValidationError("distance_to_cp: empty net");
  const int A = static_cast<int>(atoms.size());
  const int T = static_cast<int>(J.numel());
  const double slack = opt.marginal_slack >= 0 ? opt.marginal_slack : opt.net_resolution;

  // Variables: w[A], e+[T], e-[T], g+[nx], g-[nx].
  LinearProgram lp(A + 2 * T + 2 * nx);
  lp.objective.assign(lp.num_vars, 0.0);
  for (int t = 0; t < 2 * T; ++t) lp.objective[A + t] = 1.0;
  std::vector<std::vector<double>> powers;
  for (const auto& a : atoms) powers.push_back(tensor_power(a, L).pmf());
  for (int t = 0; t < T; ++t) {
    std::vector<std::pair<int, double>> row;
    for (int a = 0; a < A; ++a)
      if (powers[a][t] != 0) row.emplace_back(a, powers[a][t]);
    row.emplace_back(A + t, -1.0);
    row.emplace_back(A + T + t, 1.0);
    lp.add_eq(row, J.pmf()[t]);
  }
  {
    std::vector<std::pair<int, double>> row;
    for (int a = 0; a < A; ++a) row.emplace_back(a, 1.0);
    lp.add_eq(row, 1.0);
  }
  const int g0 = A + 2 * T;
  for (int x = 0; x < nx; ++x) {
    std::vector<std::pair<int, double>> row;
    for (int a = 0; a < A; ++a)
      if (atoms[a][x] != 0) row.emplace_back(a, atoms[a][x]);
    row.emplace_back(g0 + x, -1.0);
    row.emplace_back(g0 + nx + x, 1.0);
    lp.add_eq(row, P_x[x]);
  }
  {
    std::vector<std::pair<int, double>> row;
    for (int x = 0; x < 2 * nx; ++x) row.emplace_back(g0 + x, 1.0);
    lp.add_le(row, slack);
  }
  auto r = lp_solve(lp);
  if (!r.feasible()) throw ValidationError(std::string("distance_to_cp: LP ") + to_string(r.status));

  CpDistance out;
  out.distance = std::max(0.0, r.value);
  out.atoms = A;
  out.net_resolution = opt.net_resolution;
  out.net_error = L * opt.net_resolution;
  std::vector<double> w;
  std::vector<Dist> f;
  double tot = 0;
  for (int a = 0; a < A; ++a)
    if (r.x[a] > 1e-12) tot += r.x[a];
  for (int a = 0; a < A; ++a)
    if (r.x[a] > 1e-12) {
      w.push_back(r.x[a] / tot);
      f.push_back(atoms[a]);
    }
  out.nearest = CpDecomposition{Dist(w, 1e-7), f, L};
  return out;
}

namespace {

// Cell -> orbit (sorted multiset) index.
std::vector<int> orbit_map(int nx, int L, int& num_orbits) {
  auto ms = sorted_multisets(nx, L);
  std::map<std::vector<int>, int> idx;
  for (std::size_t i = 0; i < ms.size(); ++i) idx[ms[i]] = static_cast<int>(i);
  num_orbits = static_cast<int>(ms.size());
  std::vector<int> shape(L, nx), cell, out(static_cast<std::size_t>(ipow(nx, L)));
  for (std::size_t f = 0; f < out.size(); ++f) {
    unflatten(static_cast<long long>(f), shape, cell);
    std::sort(cell.begin(), cell.end());
    out[f] = idx.at(cell);
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double copositive_form(const CopositiveWitness& w, const Dist& R) {
  JointDist t = tensor_power(R, w.order);
  double s = 0;
  for (std::size_t i = 0; i < w.Q.size(); ++i) s += w.Q[i] * t.pmf()[i];
  return s;
}

double witness_inner(const CopositiveWitness& w, const JointDist& J) {
  if (J.numel() != w.Q.size()) throw ValidationError("witness_inner: shape mismatch");
  double s = 0;
  for (std::size_t i = 0; i < w.Q.size(); ++i) s += w.Q[i] * J.pmf()[i];
  return s;
}

double copositive_net_min(const CopositiveWitness& w, double eta) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& R : simplex_net(w.nx, eta)) m = std::min(m, copositive_form(w, R));
  return m;
}

std::optional<CopositiveWitness> copositive_witness(const JointDist& J, const Dist& P_x, double eta) {
  require_cube(J);
  const int nx = J.shape()[0], L = J.rank();
  if (P_x.size() != nx) throw ValidationError("copositive_witness: P_x size differs from |X|");
  int K = 0;
  auto orb = orbit_map(nx, L, K);
  LinearProgram lp(K);
  for (int m = 0; m < K; ++m) {
    lp.lower[m] = -1.0;
    lp.upper[m] = 1.0;
  }
  lp.objective.assign(K, 0.0);
  for (std::size_t t = 0; t < orb.size(); ++t) lp.objective[orb[t]] += J.pmf()[t];
  auto net = simplex_net(nx, eta);
  for (const auto& R : net) {
    std::vector<double> c(K, 0.0);
    JointDist t = tensor_power(R, L);
    for (std::size_t i = 0; i < orb.size(); ++i) c[orb[i]] += t.pmf()[i];
    std::vector<std::pair<int, double>> row;
    for (int m = 0; m < K; ++m)
      if (c[m] != 0) row.emplace_back(m, -c[m]);
    lp.add_le(row, 0.0);
  }
  auto r = lp_solve(lp);
  if (!r.feasible()) return std::nullopt;
  CopositiveWitness w;
  w.nx = nx;
  w.order = L;
  w.Q.resize(orb.size());
  for (std::size_t t = 0; t < orb.size(); ++t) w.Q[t] = r.x[orb[t]];
  w.value = witness_inner(w, J);
  w.margin = -w.value;
  w.net_resolution = eta;
  w.net_min = copositive_net_min(w, eta);
  w.certified_lower = w.net_min - L * eta * max_abs(w.Q);
  if (!w.certifies()) return std::nullopt;
  return w;
}

std::optional<CopositiveWitness> square_witness(const JointDist& J) {
  require_cube(J);
  const int nx = J.shape()[0], L = J.rank();
  if (L < 2 || nx < 2) return std::nullopt;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nx, nx);
  std::vector<int> cell;
  const double pairs = static_cast<double>(L) * (L - 1);
  for (std::size_t f = 0; f < J.numel(); ++f) {
    double p = J.pmf()[f];
    if (p == 0) continue;
    unflatten(static_cast<long long>(f), J.shape(), cell);
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j)
        if (i != j) M(cell[i], cell[j]) += p / pairs;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  double lam = es.eigenvalues()(0);
  if (lam >= -1e-12) return std::nullopt;
  Eigen::VectorXd v = es.eigenvectors().col(0);
  CopositiveWitness w;
  w.nx = nx;
  w.order = L;
  w.Q.assign(J.numel(), 0.0);
  for (std::size_t f = 0; f < J.numel(); ++f) {
    unflatten(static_cast<long long>(f), J.shape(), cell);
    double s = 0;
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j)
        if (i != j) s += v(cell[i]) * v(cell[j]);
    w.Q[f] = s / pairs;
  }
  double scale = max_abs(w.Q);
  for (double& q : w.Q) q /= scale;
  w.value = witness_inner(w, J);
  w.margin = -w.value;
  w.exact = true;
  w.net_min = 0;
  w.certified_lower = 0;
  if (!w.certifies()) return std::nullopt;
  return w;
}

DoubleCounting double_counting(const Codebook& code, const CopositiveWitness& w, long long budget) {
  code.validate();
  const int M = code.size(), n = code.n, L = w.order, nx = w.nx;
  if (code.nx != nx) throw ValidationError("double_counting: alphabet mismatch");
  long long tuples = 1;
  for (int i = 0; i < L; ++i) {
    tuples *= M;
    if (tuples > budget) throw BudgetExceeded("double_counting: M^L exceeds budget");
  }
  DoubleCounting r;
  std::vector<int> tup(L, 0), sym(L);
  std::vector<int> shape(L, M);
  for (long long f = 0; f < tuples; ++f) {
    unflatten(f, shape, tup);
    // <tau_tuple, Q> via the tuple's joint type.
    std::vector<long long> counts(w.Q.size(), 0);
    for (int j = 0; j < n; ++j) {
      long long c = 0;
      for (int k = 0; k < L; ++k) c = c * nx + code.codewords[tup[k]][j];
      ++counts[c];
    }
    double s = 0;
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[c]) s += w.Q[c] * static_cast<double>(counts[c]) / n;
    r.lhs += s;
  }
  double col = 0;
  for (int j = 0; j < n; ++j) {
    std::vector<double> t(nx, 0.0);
    for (int m = 0; m < M; ++m) t[code.codewords[m][j]] += 1.0 / M;
    col += copositive_form(w, Dist(t, 1e-7));
  }
  r.rhs = std::pow(static_cast<double>(M), L) / n * col;
  return r;
}

CpExtraction cp_extraction_fraction(const Codebook& code, const Dist& P_hat, double eps, int L, int K,
                                    const CpDistanceOptions& opt, long long budget) {
  code.validate();
  const int M = code.size();
  if (L < 1 || L > M) throw ValidationError("cp_extraction_fraction: need 1 <= L <= M");
  CpExtraction r;
  auto binom = [](long long a, long long b) {
    double v = 1;
    for (long long i = 1; i <= b; ++i) v = v * static_cast<double>(a - b + i) / static_cast<double>(i);
    return v;
  };
  if (binom(M, L) > static_cast<double>(budget)) throw BudgetExceeded("cp_extraction_fraction: C(M,L) exceeds budget");
  if (K >= L) {
    r.nu_floor = 1.0 / binom(K, L);
    r.turan_density_cap = 1.0 - r.nu_floor;
  }
  std::vector<int> sub(L);
  std::iota(sub.begin(), sub.end(), 0);
  while (true) {
    std::vector<std::vector<int>> seqs;
    for (int i : sub) seqs.push_back(code.codewords[i]);
    JointDist tau = joint_type(seqs, std::vector<int>(L, code.nx)).to_joint(tuple_axes(L));
    ++r.subsets;
    if (distance_to_cp(tau, P_hat, opt).distance <= eps + 1e-9) ++r.close;
    int i = L - 1;
    while (i >= 0 && sub[i] == M - L + i) --i;
    if (i < 0) break;
    ++sub[i];
    for (int j = i + 1; j < L; ++j) sub[j] = sub[j - 1] + 1;
  }
  r.fraction = static_cast<double>(r.close) / static_cast<double>(r.subsets);
  return r;
}

bool product_characterization_check(const Dist& P, const JointDist& Q, int L, double tol) {
  require_cube(Q);
  const int nx = P.size();
  if (Q.rank() != L || Q.shape()[0] != nx) throw ValidationError("product_characterization_check: shape mismatch");
  if (ipow(nx, L + 1) > kDefaultBudget) throw BudgetExceeded("product_characterization_check: |X|^(L+1) too large");
  std::vector<int> shape(L + 1, nx), cell, rest(L);
  bool hypothesis = true;
  const long long total = ipow(nx, L + 1);
  for (long long f = 0; f < total && hypothesis; ++f) {
    unflatten(f, shape, cell);
    std::vector<double> v(L + 1);
    for (int i = 0; i <= L; ++i) {
      int k = 0;
      for (int j = 0; j <= L; ++j)
        if (j != i) rest[k++] = cell[j];
      v[i] = P[cell[i]] * Q.at(rest);
    }
    for (int i = 1; i <= L; ++i)
      if (std::abs(v[i] - v[0]) > tol) hypothesis = false;
  }
  if (!hypothesis) return true;
  return l1_distance(Q.pmf(), tensor_power(P, L).pmf()) <= tol * static_cast<double>(Q.numel());
}

}  // namespace avc
