#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avc/attack.hpp"
#include "avc/canonical.hpp"
#include "avc/codegen.hpp"
#include "avc/rng.hpp"

using namespace avc;

namespace {

Codebook weight_code(int n, int M, double w, std::uint64_t seed) {
  return sample_codebook(n, M, {}, CondDist({1}, {Dist({1 - w, w})}), seed);
}

}  // namespace

TEST_CASE("identity attack replays a uniformly chosen codeword") {
  auto avc = build_canonical(demo_pset(), 1);
  auto code = weight_code(20, 10, 0.2, 1);
  auto plan = plan_cp_attack(avc, code, 1);
  CHECK(plan.kernel.flat() == identity_kernel(2, 1).flat());
  std::vector<int> hits(10, 0);
  const int T = 4000;
  for (int t = 0; t < T; ++t) {
    auto tr = run_cp_attack(avc, code, plan, mix_seed(5, t));
    REQUIRE(tr.list.size() == 1);
    CHECK(tr.s_seq == code.codewords[tr.list[0]]);
    ++hits[tr.list[0]];
  }
  // Each index has mean 400 and sd about 19.
  for (int h : hits) CHECK(std::abs(h - T / 10) < 100);
}

TEST_CASE("attacks are reproducible from the seed") {
  auto avc = bitflip_avc(0.7);
  auto code = weight_code(40, 12, 0.2, 2);
  auto a = cp_symmetrization_attack(avc, code, 2, {}, 99);
  auto b = cp_symmetrization_attack(avc, code, 2, {}, 99);
  auto c = cp_symmetrization_attack(avc, code, 2, {}, 100);
  CHECK(a.s_seq == b.s_seq);
  CHECK(a.list == b.list);
  CHECK((a.s_seq != c.s_seq || a.list != c.list));
  CondDist U({2}, {Dist({0.9, 0.1}), Dist({0.5, 0.5})});
  std::vector<int> u(50);
  for (int j = 0; j < 50; ++j) u[j] = j % 2;
  CHECK(iid_state_attack(U, u, 3) == iid_state_attack(U, u, 3));
}

TEST_CASE("symmetrizing kernel makes the output law role-invariant") {
  auto avc = bitflip_avc(0.7);
  auto code = weight_code(4, 6, 0.25, 3);
  auto plan = plan_cp_attack(avc, code, 2);
  const auto& K = plan.kernel;
  const int n = 4, L = 2, per_u = 4;
  Rng g(8);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<int>> roles(L + 1, std::vector<int>(n));
    for (auto& r : roles)
      for (auto& v : r) v = uniform_index(g, 2);
    for (int u = 0; u < K.nu; ++u) {
      // Law of y^n with the transmitted word in role 0 and the list in roles 1..L.
      auto law = [&](const std::vector<int>& perm) {
        const auto& x = roles[perm[0]];
        std::vector<double> out(1 << n, 0.0);
        for (int sm = 0; sm < (1 << n); ++sm) {
          std::vector<int> s(n);
          double p = 1;
          for (int j = 0; j < n; ++j) {
            s[j] = sm >> j & 1;
            const int ctx = roles[perm[1]][j] * 2 + roles[perm[2]][j];
            p *= K.U(u * per_u + ctx, s[j]);
          }
          if (p == 0) continue;
          auto y = output_distribution(avc, x, s);
          for (std::size_t k = 0; k < out.size(); ++k) out[k] += p * y.pmf()[k];
        }
        return out;
      };
      std::vector<int> perm = {0, 1, 2};
      auto base = law(perm);
      while (std::next_permutation(perm.begin(), perm.end())) CHECK(l1_distance(law(perm), base) < 1e-9);
    }
  }
}

TEST_CASE("expected cost and good event") {
  auto avc = bitflip_avc(0.7);
  auto code = weight_code(60, 14, 0.2, 4);
  AttackConfig cfg;
  auto plan = plan_cp_attack(avc, code, 2, cfg);
  REQUIRE(plan.margins.size() == 1);
  CHECK(plan.margins[0] > 0);
  CHECK(plan.cp_distance <= cfg.eps);
  const int T = 400;
  double mean = 0, cond = 0;
  int good = 0;
  for (int t = 0; t < T; ++t) {
    auto tr = run_cp_attack(avc, code, plan, mix_seed(11, t), cfg);
    mean += tr.costs[0] / T;
    cond += tr.list_costs[0] / T;
    good += tr.good_event;
  }
  const double B = avc.lambda_s.polytope.row_max_abs(0);
  const double formula = avc.lambda_s.polytope.gamma[0] - plan.margins[0] + avc.ns() * B * (cfg.eta + cfg.eps);
  CHECK(mean <= formula);
  CHECK(std::abs(mean - cond) < 0.02);
  CHECK(good > 0);
}

TEST_CASE("compliance frequency clears the union bound") {
  auto avc = bitflip_avc(0.7);
  const int n = 200;
  auto code = weight_code(n, 10, 0.2, 6);
  auto plan = plan_cp_attack(avc, code, 2);
  const double floor = compliance_floor(avc.lambda_s.polytope, plan.margins, n);
  CHECK(floor > 0.5);
  int ok = 0;
  const int T = 200;
  for (int t = 0; t < T; ++t) ok += run_cp_attack(avc, code, plan, mix_seed(12, t)).all_compliant();
  CHECK(static_cast<double>(ok) / T >= floor);
  CHECK(compliance_floor(avc.lambda_s.polytope, {-0.1}, n) == 0);
}

TEST_CASE("i.i.d. states") {
  CondDist point({1}, {Dist({0.0, 1.0})});
  auto s = iid_state_attack(point, std::vector<int>(30, 0), 1);
  CHECK(std::all_of(s.begin(), s.end(), [](int v) { return v == 1; }));

  const double p = 0.3, delta = 0.05;
  const int n = 400, T = 300;
  CondDist bern({1}, {Dist({1 - p, p})});
  int outside = 0;
  for (int t = 0; t < T; ++t) {
    auto seq = iid_state_attack(bern, std::vector<int>(n, 0), mix_seed(2, t));
    double w = std::accumulate(seq.begin(), seq.end(), 0.0) / n;
    outside += std::abs(w - p) >= delta;
  }
  // Chebyshev with B* = 1.
  CHECK(static_cast<double>(outside) / T <= 1.0 / (n * delta * delta));
  CHECK_THROWS_AS(iid_state_attack(bern, {0, 1}, 1), ValidationError);
}

TEST_CASE("codeword-list state law") {
  Codebook c;
  c.n = 3;
  c.nx = 2;
  c.codewords = {{0, 1, 1}, {1, 0, 1}, {0, 0, 0}};
  auto law = codeword_list_state_law(c, 2);
  CHECK(law.seqs.size() == 9);
  CHECK(std::abs(std::accumulate(law.probs.begin(), law.probs.end(), 0.0) - 1) < 1e-12);
  // Tuple (0, 1): s(j) = 2 x_0(j) + x_1(j).
  CHECK(law.seqs[1] == std::vector<int>{1, 2, 3});
  CHECK(codeword_list_state_law(c, 1).seqs == c.codewords);
  CHECK_THROWS_AS(codeword_list_state_law(c, 2, 5), BudgetExceeded);
}
