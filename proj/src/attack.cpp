#include "avc/attack.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "avc/codegen.hpp"
#include "avc/rng.hpp"

namespace avc {

namespace {

// P(u | x_1..x_L) under the decomposition.
std::vector<double> posterior(const CpDecomposition& d, const std::vector<int>& ctx) {
  std::vector<double> p(d.k());
  double s = 0;
  for (int u = 0; u < d.k(); ++u) {
    double w = d.weights[u];
    for (int x : ctx) w *= d.factors[u][x];
    s += (p[u] = w);
  }
  if (s <= 0) {
    // Context outside the decomposition's support: fall back to the weights.
    for (int u = 0; u < d.k(); ++u) p[u] = d.weights[u];
    return p;
  }
  for (auto& v : p) v /= s;
  return p;
}

}  // namespace

bool AttackTranscript::all_compliant() const {
  return std::all_of(compliant.begin(), compliant.end(), [](bool b) { return b; });
}

CpAttackPlan plan_cp_attack(const ObliviousAVC& avc, const Codebook& code, int L, const AttackConfig& cfg) {
  code.validate();
  if (code.codewords.empty()) throw ValidationError("cp attack: empty code");
  if (code.nx != avc.nx()) throw ValidationError("cp attack: code alphabet differs from |X|");
  if (L < 1) throw ValidationError("cp attack: L must be >= 1");
  CpAttackPlan plan;
  plan.L = L;
  auto red = cc_reduce(code, cfg.lambda);
  plan.subcode = red.kept;
  plan.P_hat_x = red.P_hat;
  if (red.subcode.size() < L) throw ValidationError("cp attack: composition subcode has fewer than L codewords");
  auto spectrum = joint_type_spectrum(red.subcode, L, cfg.budget);
  if (spectrum.empty()) throw ValidationError("cp attack: empty joint-type spectrum");
  plan.tuples = static_cast<long long>(spectrum.size());

  const int cells = static_cast<int>(ipow(code.nx, L));
  const int D = net_denominator(cells, cfg.eta);
  std::map<std::vector<long long>, long long> count;
  for (const auto& J : spectrum) ++count[largest_remainder(J.pmf(), D)];
  auto best = count.begin();
  for (auto it = count.begin(); it != count.end(); ++it)
    if (it->second > best->second) best = it;
  plan.cell_count = best->second;
  std::vector<double> ph(cells);
  for (int i = 0; i < cells; ++i) ph[i] = static_cast<double>(best->first[i]) / D;
  plan.P_hat = JointDist(std::vector<int>(L, code.nx), tuple_axes(L), ph);

  if (L == 1) {
    plan.decomposition = CpDecomposition{Dist({1.0}), {Dist(ph)}, 1};
    plan.cp_distance = 0;
  } else {
    auto dist = distance_to_cp(plan.P_hat, plan.P_hat_x, cfg.cp);
    plan.decomposition = dist.nearest;
    plan.cp_distance = dist.distance;
    if (dist.distance > cfg.eps)
      plan.warnings.push_back("projected cp law is " + std::to_string(dist.distance) + " from the densest cell (eps " +
                              std::to_string(cfg.eps) + ")");
  }
  plan.P_tilde = cp_synthesize(plan.decomposition);

  auto v = check_decomposition(avc, plan.decomposition, cfg.sym);
  if (!v.is_yes() || !v.witness)
    throw ValidationError("cp attack: no symmetrizing kernel for the selected decomposition (" + v.certificate + ")");
  plan.kernel = *v.witness;
  if (avc.lambda_s.is_polytope()) {
    plan.plan_costs = jamming_costs(plan.decomposition.weights, CondDist({plan.decomposition.k()}, plan.decomposition.factors),
                                    plan.kernel, avc.lambda_s.polytope);
    for (std::size_t i = 0; i < plan.plan_costs.size(); ++i) {
      plan.margins.push_back(avc.lambda_s.polytope.gamma[i] - plan.plan_costs[i]);
      if (plan.margins.back() <= 0)
        plan.warnings.push_back("state constraint " + std::to_string(i) + " has no interior margin");
    }
  }
  for (const auto& w : plan.warnings) spdlog::warn("cp attack: {}", w);
  return plan;
}

AttackTranscript run_cp_attack(const ObliviousAVC& avc, const Codebook& code, const CpAttackPlan& plan,
                               std::uint64_t seed, const AttackConfig& cfg) {
  const int L = plan.L, n = code.n, nx = code.nx, ns = avc.ns();
  Rng g(seed);
  std::vector<int> pool = plan.subcode;
  for (int k = 0; k < L; ++k) {
    int j = k + uniform_index(g, static_cast<int>(pool.size()) - k);
    std::swap(pool[k], pool[j]);
  }
  AttackTranscript t;
  t.list.assign(pool.begin(), pool.begin() + L);
  std::sort(t.list.begin(), t.list.end());

  const auto& K = plan.kernel;
  const long long per_u = ipow(nx, L);
  const bool by_u = K.nu > 1;
  const ConstraintPolytope* poly = avc.lambda_s.is_polytope() ? &avc.lambda_s.polytope : nullptr;
  const int rows = poly ? poly->rows() : 0;
  t.s_seq.resize(n);
  if (by_u) t.u_seq.resize(n);
  t.costs.assign(rows, 0.0);
  t.list_costs.assign(rows, 0.0);
  std::vector<int> ctx(L);
  std::vector<std::vector<int>> list_words;
  for (int i : t.list) list_words.push_back(code.codewords[i]);
  for (int j = 0; j < n; ++j) {
    long long c = 0;
    for (int k = 0; k < L; ++k) {
      ctx[k] = list_words[k][j];
      c = c * nx + ctx[k];
    }
    std::vector<double> post = by_u ? posterior(plan.decomposition, ctx) : std::vector<double>{1.0};
    int u = 0;
    if (by_u) {
      u = sample_index(g, post);
      t.u_seq[j] = u;
    }
    const Dist& row = K.U.row(static_cast<int>((by_u ? u * per_u : 0) + c));
    t.s_seq[j] = sample_index(g, row.pmf());
    for (int i = 0; i < rows; ++i) {
      t.costs[i] += poly->A[i][t.s_seq[j]] / n;
      double m = 0;
      for (std::size_t uu = 0; uu < post.size(); ++uu) {
        const Dist& r = K.U.row(static_cast<int>((by_u ? uu * per_u : 0) + c));
        for (int s = 0; s < ns; ++s) m += post[uu] * r[s] * poly->A[i][s];
      }
      t.list_costs[i] += m / n;
    }
  }
  for (int i = 0; i < rows; ++i) t.compliant.push_back(t.costs[i] <= poly->gamma[i] + 1e-9);
  auto tau = joint_type(list_words, std::vector<int>(L, nx)).to_joint(tuple_axes(L));
  t.list_distance = l1_distance(tau.pmf(), plan.P_tilde.pmf());
  t.good_event = t.list_distance <= cfg.eta + cfg.eps;
  return t;
}

AttackTranscript cp_symmetrization_attack(const ObliviousAVC& avc, const Codebook& code, int L,
                                          const AttackConfig& cfg, std::uint64_t seed) {
  return run_cp_attack(avc, code, plan_cp_attack(avc, code, L, cfg), seed, cfg);
}

double compliance_floor(const ConstraintPolytope& lambda_s, const std::vector<double>& margins, int n) {
  if (static_cast<int>(margins.size()) != lambda_s.rows()) throw ValidationError("compliance_floor: one margin per row");
  double s = 0;
  for (int i = 0; i < lambda_s.rows(); ++i) {
    if (margins[i] <= 0) return 0;
    const double b = lambda_s.row_max_abs(i);
    s += 4 * b * b / (n * margins[i] * margins[i]);
  }
  return std::max(0.0, 1 - s);
}

std::vector<int> iid_state_attack(const CondDist& U, const std::vector<int>& u_seq, std::uint64_t seed) {
  if (u_seq.empty()) throw ValidationError("iid_state_attack: empty u_seq");
  Rng g(seed);
  std::vector<int> s(u_seq.size());
  for (std::size_t j = 0; j < u_seq.size(); ++j) {
    if (u_seq[j] < 0 || u_seq[j] >= U.num_rows())
      throw ValidationError("iid_state_attack: u_seq symbol " + std::to_string(u_seq[j]) + " has no kernel row");
    s[j] = sample_index(g, U.row(u_seq[j]).pmf());
  }
  return s;
}

StateLaw point_state_law(const std::vector<int>& s) { return StateLaw{{s}, {1.0}}; }

StateLaw codeword_list_state_law(const Codebook& code, int L, long long budget) {
  const int M = code.size();
  if (L < 1 || M < 1) throw ValidationError("codeword_list_state_law: need L >= 1 and a nonempty code");
  if (std::pow(static_cast<double>(M), L) > static_cast<double>(budget))
    throw BudgetExceeded("codeword_list_state_law: M^L exceeds the budget");
  const long long total = ipow(M, L);
  StateLaw law;
  std::vector<int> idx, shape(L, M);
  for (long long t = 0; t < total; ++t) {
    unflatten(t, shape, idx);
    std::vector<int> s(code.n, 0);
    for (int j = 0; j < code.n; ++j)
      for (int k = 0; k < L; ++k) s[j] = s[j] * code.nx + code.codewords[idx[k]][j];
    law.seqs.push_back(std::move(s));
    law.probs.push_back(1.0 / static_cast<double>(total));
  }
  return law;
}

}  // namespace avc
