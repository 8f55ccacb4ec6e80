#include "avc/codegen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "avc/rng.hpp"

namespace avc {

namespace {

std::vector<std::vector<int>> chunk_positions(const std::vector<int>& u_seq, int n, int nu) {
  std::vector<std::vector<int>> pos(nu);
  for (int j = 0; j < n; ++j) pos[u_seq.empty() ? 0 : u_seq[j]].push_back(j);
  return pos;
}

double log2_binom(long long a, long long b) {
  return (std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0)) / std::log(2.0);
}

// Joint type of the given sequences, as counts plus a JointDist on `axes`.
struct TypeKey {
  std::vector<long long> counts;
  bool operator<(const TypeKey& o) const { return counts < o.counts; }
};

TypeKey type_of(const std::vector<const std::vector<int>*>& seqs, const std::vector<int>& shape) {
  TypeKey k;
  long long cells = 1;
  for (int a : shape) cells *= a;
  k.counts.assign(cells, 0);
  const std::size_t n = seqs[0]->size();
  for (std::size_t j = 0; j < n; ++j) {
    long long f = 0;
    for (std::size_t i = 0; i < seqs.size(); ++i) f = f * shape[i] + (*seqs[i])[j];
    ++k.counts[f];
  }
  return k;
}

JointDist to_joint(const TypeKey& k, const std::vector<int>& shape, const std::vector<std::string>& axes) {
  long long n = 0;
  for (auto c : k.counts) n += c;
  std::vector<double> p(k.counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(k.counts[i]) / n;
  return JointDist(shape, axes, std::move(p));
}

std::vector<std::string> list_axes(int L) {
  std::vector<std::string> a;
  for (int k = 1; k <= L; ++k) a.push_back("x" + std::to_string(k));
  return a;
}

}  // namespace

std::vector<std::vector<long long>> chunk_compositions(const std::vector<int>& u_seq, int nu,
                                                      const CondDist& P_x_given_u) {
  if (P_x_given_u.num_rows() != nu) throw ValidationError("chunk_compositions: P_{x|u} rows differ from |U|");
  std::vector<long long> len(nu, 0);
  for (int u : u_seq) {
    if (u < 0 || u >= nu) throw ValidationError("chunk_compositions: u_seq symbol outside U");
    ++len[u];
  }
  std::vector<std::vector<long long>> out;
  for (int u = 0; u < nu; ++u) {
    if (len[u] == 0) throw ValidationError("chunk " + std::to_string(u) + " is empty; no type fits it");
    out.push_back(largest_remainder(P_x_given_u.row(u).pmf(), len[u]));
  }
  return out;
}

Codebook sample_codebook(int n, int M, const std::vector<int>& u_seq, const CondDist& P_x_given_u,
                         std::uint64_t seed) {
  if (n < 1 || M < 1) throw ValidationError("sample_codebook: n and M must be >= 1");
  if (!u_seq.empty() && static_cast<int>(u_seq.size()) != n) throw ValidationError("sample_codebook: u_seq length differs from n");
  const int nu = P_x_given_u.num_rows(), nx = P_x_given_u.out_size();
  std::vector<int> us = u_seq.empty() ? std::vector<int>(n, 0) : u_seq;
  auto comp = chunk_compositions(us, nu, P_x_given_u);
  auto pos = chunk_positions(us, n, nu);
  Codebook c;
  c.n = n;
  c.nx = nx;
  c.nu = nu;
  if (!u_seq.empty()) c.u_seq = u_seq;
  Rng g(seed);
  for (int i = 0; i < M; ++i) {
    std::vector<int> x(n);
    for (int u = 0; u < nu; ++u) {
      std::vector<int> sym;
      for (int a = 0; a < nx; ++a) sym.insert(sym.end(), comp[u][a], a);
      shuffle_in_place(g, sym);
      for (std::size_t t = 0; t < sym.size(); ++t) x[pos[u][t]] = sym[t];
    }
    c.codewords.push_back(std::move(x));
  }
  return c;
}

Dist composition(const std::vector<int>& x, int nx, const std::vector<int>& positions) {
  std::vector<double> p(nx, 0.0);
  if (positions.empty()) {
    for (int v : x) p[v] += 1.0;
    for (auto& v : p) v /= static_cast<double>(x.size());
  } else {
    for (int j : positions) p[x[j]] += 1.0;
    for (auto& v : p) v /= static_cast<double>(positions.size());
  }
  return Dist(std::move(p));
}

double cc_size_factor(int nx, double lambda) { return std::pow(nx / (2.0 * lambda) + 1.0, nx); }

CcReduction cc_reduce(const Codebook& code, double lambda, const std::vector<int>& positions) {
  if (!(lambda > 0)) throw ValidationError("cc_reduce: lambda must be > 0");
  if (code.codewords.empty()) throw ValidationError("cc_reduce: empty code");
  auto net = simplex_net(code.nx, lambda);
  std::vector<std::vector<int>> cell(net.size());
  for (int i = 0; i < code.size(); ++i)
    cell[nearest_index(net, composition(code.codewords[i], code.nx, positions).pmf())].push_back(i);
  std::size_t best = 0;
  CcReduction r;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    if (!cell[k].empty()) ++r.cells;
    if (cell[k].size() > cell[best].size()) best = k;
  }
  r.P_hat = net[best];
  r.kept = cell[best];
  r.subcode = code;
  r.subcode.codewords.clear();
  for (int i : r.kept) r.subcode.codewords.push_back(code.codewords[i]);
  r.size_floor = code.size() / cc_size_factor(code.nx, lambda);
  return r;
}

std::vector<JointDist> joint_type_spectrum(const Codebook& code, int L, long long budget) {
  const int M = code.size();
  if (L < 1 || L > M) throw ValidationError("joint_type_spectrum: need 1 <= L <= M");
  if (log2_binom(M, L) > std::log2(static_cast<double>(budget)))
    throw BudgetExceeded("joint_type_spectrum: C(M, L) exceeds the budget");
  const std::vector<int> shape(L, code.nx);
  const auto axes = list_axes(L);
  std::vector<JointDist> out;
  std::vector<int> idx(L);
  for (int k = 0; k < L; ++k) idx[k] = k;
  std::vector<const std::vector<int>*> seqs(L);
  while (true) {
    for (int k = 0; k < L; ++k) seqs[k] = &code.codewords[idx[k]];
    out.push_back(to_joint(type_of(seqs, shape), shape, axes));
    int k = L - 1;
    while (k >= 0 && idx[k] == M - L + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int t = k + 1; t < L; ++t) idx[t] = idx[t - 1] + 1;
  }
  return out;
}

bool CwPropertyReport::all_pass() const {
  for (const auto& p : properties)
    if (p.applicable && !p.pass) return false;
  return true;
}

const PropertyCheck& CwPropertyReport::get(const std::string& name) const {
  for (const auto& p : properties)
    if (p.name == name) return p;
  throw ValidationError("no property named " + name);
}

CwPropertyReport verify_cw_properties(const Codebook& code, const std::vector<int>& u_seq, int nu,
                                      const std::vector<int>& s_seq, int ns, double eps, int L,
                                      long long budget) {
  code.validate();
  const int M = code.size(), n = code.n, nx = code.nx;
  if (!(eps > 0)) throw ValidationError("verify_cw_properties: eps must be > 0");
  if (L < 1) throw ValidationError("verify_cw_properties: L must be >= 1");
  std::vector<int> us = u_seq.empty() ? std::vector<int>(n, 0) : u_seq;
  if (static_cast<int>(us.size()) != n || static_cast<int>(s_seq.size()) != n)
    throw ValidationError("verify_cw_properties: sequence lengths differ from n");
  for (int u : us)
    if (u < 0 || u >= nu) throw ValidationError("verify_cw_properties: u symbol outside U");
  for (int s : s_seq)
    if (s < 0 || s >= ns) throw ValidationError("verify_cw_properties: s symbol outside S");

  CwPropertyReport rep;
  rep.rate = std::log2(static_cast<double>(M) / L) / n;
  for (const char* name : {"1", "2", "3", "2'", "3'"}) {
    PropertyCheck p;
    p.name = name;
    p.conditional = p.name.size() == 2;
    rep.properties.push_back(p);
  }
  if (std::log2(static_cast<double>(M)) < std::log2(static_cast<double>(L)) + n * eps) {
    rep.applicable = false;
    rep.note = "M < L 2^(n eps): the codeword-selection preconditions do not hold";
    for (auto& p : rep.properties) p.applicable = false;
    return rep;
  }
  const double pair_work = static_cast<double>(M) * M;
  const double list_work = static_cast<double>(M) * std::exp2(log2_binom(M, L));
  if (pair_work > budget) throw BudgetExceeded("verify_cw_properties: M^2 exceeds the budget");
  const bool lists = list_work <= budget;
  if (!lists) {
    rep.properties[3].applicable = rep.properties[4].applicable = false;
    rep.note = "M C(M,L) exceeds the budget; 2' and 3' skipped";
  }
  const double R = rep.rate;
  const double shrink = std::exp2(-n * eps / 2);
  auto pos = [](double v) { return std::max(0.0, v); };

  // Property 1: axes u, x, s.
  {
    auto& p = rep.properties[0];
    std::map<TypeKey, long long> groups;
    const std::vector<int> shape = {nu, nx, ns};
    for (int i = 0; i < M; ++i) ++groups[type_of({&us, &code.codewords[i], &s_seq}, shape)];
    for (const auto& [k, cnt] : groups) {
      auto J = to_joint(k, shape, {"u", "x", "s"});
      if (mutual_info(J, "x", "s", "u") < eps) continue;
      ++p.types_checked;
      const double frac = static_cast<double>(cnt) / M;
      if (frac > shrink) {
        p.pass = false;
        p.violations.push_back({k.counts, frac, shrink});
      }
    }
  }
  // Properties 2 and 3: axes u, x, xk, s over ordered pairs.
  {
    const std::vector<int> shape = {nu, nx, nx, ns};
    const std::vector<std::string> axes = {"u", "x", "xk", "s"};
    std::map<TypeKey, std::set<int>> owners;             // type -> i having some j != i
    std::map<TypeKey, std::map<int, long long>> probes;  // type -> probe i -> #j (any j)
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        auto k = type_of({&us, &code.codewords[i], &code.codewords[j], &s_seq}, shape);
        if (j != i) owners[k].insert(i);
        ++probes[k][i];
      }
    auto& p2 = rep.properties[1];
    for (const auto& [k, who] : owners) {
      auto J = to_joint(k, shape, axes);
      const double lhs = mutual_info(J, std::vector<std::string>{"x"}, {"xk", "s"}, {"u"});
      if (lhs < pos(R - mutual_info(J, "xk", "s", "u")) + eps) continue;
      ++p2.types_checked;
      const double frac = static_cast<double>(who.size()) / M;
      if (frac > shrink) {
        p2.pass = false;
        p2.violations.push_back({k.counts, frac, shrink});
      }
    }
    auto& p3 = rep.properties[2];
    for (const auto& [k, per] : probes) {
      auto J = to_joint(k, shape, axes);
      const double bound =
          std::exp2(n * (pos(R - mutual_info(J, std::vector<std::string>{"xk"}, {"x", "s"}, {"u"})) + eps));
      ++p3.types_checked;
      for (const auto& [i, cnt] : per)
        if (cnt > bound) {
          p3.pass = false;
          p3.violations.push_back({k.counts, static_cast<double>(cnt), bound});
          break;
        }
    }
  }
  if (!lists) return rep;
  // Properties 2' and 3': axes u, x, x1..xL, s over ascending L-lists.
  {
    std::vector<int> shape = {nu, nx};
    std::vector<std::string> axes = {"u", "x"};
    const auto xs = list_axes(L);
    for (const auto& a : xs) {
      shape.push_back(nx);
      axes.push_back(a);
    }
    shape.push_back(ns);
    axes.push_back("s");
    std::map<TypeKey, std::set<int>> owners;
    std::map<TypeKey, std::map<int, long long>> probes;
    std::vector<int> idx(L);
    std::vector<const std::vector<int>*> seqs(L + 3);
    seqs[0] = &us;
    seqs[L + 2] = &s_seq;
    if (L <= M) {
      for (int k = 0; k < L; ++k) idx[k] = k;
      while (true) {
        for (int k = 0; k < L; ++k) seqs[2 + k] = &code.codewords[idx[k]];
        for (int i = 0; i < M; ++i) {
          seqs[1] = &code.codewords[i];
          auto key = type_of(seqs, shape);
          if (std::find(idx.begin(), idx.end(), i) == idx.end()) owners[key].insert(i);
          ++probes[key][i];
        }
        int k = L - 1;
        while (k >= 0 && idx[k] == M - L + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int t = k + 1; t < L; ++t) idx[t] = idx[t - 1] + 1;
      }
    }
    auto condition = [&](const JointDist& J) {
      for (const auto& a : xs)
        if (!(R < mutual_info(J, a, "s", "u"))) return false;
      return true;
    };
    auto& p22 = rep.properties[3];
    for (const auto& [k, who] : owners) {
      auto J = to_joint(k, shape, axes);
      if (!condition(J)) continue;
      std::vector<std::string> rhs = xs;
      rhs.push_back("s");
      if (mutual_info(J, std::vector<std::string>{"x"}, rhs, {"u"}) < eps) continue;
      ++p22.types_checked;
      const double frac = static_cast<double>(who.size()) / M;
      if (frac > shrink) {
        p22.pass = false;
        p22.violations.push_back({k.counts, frac, shrink});
      }
    }
    auto& p33 = rep.properties[4];
    const double cap = std::exp2(n * eps);
    for (const auto& [k, per] : probes) {
      if (!condition(to_joint(k, shape, axes))) continue;
      ++p33.types_checked;
      for (const auto& [i, cnt] : per)
        if (cnt > cap) {
          p33.pass = false;
          p33.violations.push_back({k.counts, static_cast<double>(cnt), cap});
          break;
        }
    }
  }
  return rep;
}

TimeshareSubcode extract_timeshare_subcode(const Codebook& code, double zeta, double lambda_p, double theta_floor) {
  code.validate();
  if (code.codewords.empty()) throw ValidationError("extract_timeshare_subcode: empty code");
  if (!(zeta > 0) || !(lambda_p > 0)) throw ValidationError("extract_timeshare_subcode: zeta and lambda' must be > 0");
  const int n = code.n, nx = code.nx, M = code.size();
  auto net = simplex_net(nx, zeta);
  TimeshareSubcode r;
  r.u_seq.assign(n, 0);
  std::map<int, int> label;  // net index -> u, in order of first column
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(nx, 0.0);
    for (const auto& x : code.codewords) col[x[j]] += 1.0 / M;
    const int cell = nearest_index(net, col);
    auto it = label.find(cell);
    if (it == label.end()) {
      it = label.emplace(cell, static_cast<int>(label.size())).first;
      r.column_cells.push_back(net[cell]);
    }
    r.u_seq[j] = it->second;
  }
  r.nu = static_cast<int>(label.size());
  auto pos = chunk_positions(r.u_seq, n, r.nu);
  std::vector<int> kept(M);
  for (int i = 0; i < M; ++i) kept[i] = i;
  Codebook cur = code;
  for (int u = 0; u < r.nu; ++u) {
    auto red = cc_reduce(cur, lambda_p, pos[u]);
    std::vector<int> next;
    for (int i : red.kept) next.push_back(kept[i]);
    kept = std::move(next);
    cur = std::move(red.subcode);
  }
  for (int u = 0; u < r.nu; ++u) {
    std::vector<double> avg(nx, 0.0);
    for (const auto& x : cur.codewords) {
      auto c = composition(x, nx, pos[u]);
      for (int a = 0; a < nx; ++a) avg[a] += c[a] / cur.size();
    }
    r.chunk_compositions.emplace_back(avg, 1e-6);
  }
  r.kept = kept;
  r.subcode = std::move(cur);
  r.subcode.u_seq = r.u_seq;
  r.subcode.nu = r.nu;
  r.theta = static_cast<double>(r.subcode.size()) / M;
  r.theta_bound = std::pow(cc_size_factor(nx, lambda_p), -static_cast<double>(r.nu));
  r.meets_floor = r.theta >= std::max(theta_floor, r.theta_bound) - 1e-12;
  return r;
}

ListFact list_generation_fact(int M, int L, const std::vector<std::vector<int>>& lists) {
  if (L < 1 || M < L + 1) throw ValidationError("list_generation_fact: need 1 <= L < M");
  std::set<std::vector<int>> family, gen;
  for (auto l : lists) {
    std::sort(l.begin(), l.end());
    if (static_cast<int>(l.size()) != L + 1 || std::adjacent_find(l.begin(), l.end()) != l.end())
      throw ValidationError("list_generation_fact: every list needs L+1 distinct members");
    for (int v : l)
      if (v < 0 || v >= M) throw ValidationError("list_generation_fact: member outside [M]");
    family.insert(l);
    for (int drop = 0; drop <= L; ++drop) {
      std::vector<int> sub;
      for (int k = 0; k <= L; ++k)
        if (k != drop) sub.push_back(l[k]);
      gen.insert(sub);
    }
  }
  ListFact f;
  f.family = static_cast<long long>(family.size());
  f.generated = static_cast<long long>(gen.size());
  f.holds = f.generated * (M - L) >= f.family;
  return f;
}

}  // namespace avc
