#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "avc/codegen.hpp"
#include "avc/cpcone.hpp"
#include "avc/rng.hpp"

using namespace avc;

namespace {

Codebook random_code(Rng& g, int M, int n, int nx) {
  Codebook c;
  c.n = n;
  c.nx = nx;
  for (int i = 0; i < M; ++i) {
    std::vector<int> x(n);
    for (auto& v : x) v = uniform_index(g, nx);
    c.codewords.push_back(x);
  }
  return c;
}

}  // namespace

TEST_CASE("sampled codewords have the exact type") {
  auto c = sample_codebook(4, 30, {}, CondDist({1}, {Dist({0.5, 0.5})}), 7);
  CHECK(c.size() == 30);
  for (const auto& x : c.codewords) CHECK(std::count(x.begin(), x.end(), 1) == 2);
  CHECK(sample_codebook(4, 30, {}, CondDist({1}, {Dist({0.5, 0.5})}), 7).codewords == c.codewords);
  CHECK(sample_codebook(4, 30, {}, CondDist({1}, {Dist({0.5, 0.5})}), 8).codewords != c.codewords);

  std::vector<int> u(20);
  for (int j = 0; j < 20; ++j) u[j] = j % 2;
  CondDist P({2}, {Dist({0.7, 0.3}), Dist({0.2, 0.8})});
  auto d = sample_codebook(20, 50, u, P, 1);
  CHECK(d.u_seq == u);
  std::vector<int> c0, c1;
  for (int j = 0; j < 20; ++j) (u[j] ? c1 : c0).push_back(j);
  for (const auto& x : d.codewords) {
    CHECK(composition(x, 2, c0).pmf() == std::vector<double>{0.7, 0.3});
    CHECK(composition(x, 2, c1).pmf() == std::vector<double>{0.2, 0.8});
  }
  // 7 * (0.5, 0.5): largest remainder gives (4, 3).
  auto odd = chunk_compositions(std::vector<int>(7, 0), 1, CondDist({1}, {Dist({0.5, 0.5})}));
  CHECK(odd[0][0] + odd[0][1] == 7);
  CHECK_THROWS_AS(sample_codebook(4, 3, {0, 0, 0, 0}, P, 1), ValidationError);
}

TEST_CASE("pair types concentrate as n grows") {
  const Dist P({0.5, 0.5});
  auto prod = tensor_power(P, 2);
  auto mean_dist = [&](int n) {
    auto c = sample_codebook(n, 20, {}, CondDist({1}, {P}), 3);
    double s = 0;
    auto spec = joint_type_spectrum(c, 2);
    for (const auto& J : spec) s += l1_distance(J.pmf(), prod.pmf());
    return s / spec.size();
  };
  double d50 = mean_dist(50), d500 = mean_dist(500);
  CHECK(d500 < d50);
  CHECK(d500 < 0.1);
}

TEST_CASE("composition reduction") {
  auto cc = sample_codebook(20, 10, {}, CondDist({1}, {Dist({0.6, 0.4})}), 2);
  auto r = cc_reduce(cc, 0.05);
  CHECK(r.subcode.codewords == cc.codewords);
  CHECK(l1_distance(r.P_hat.pmf(), std::vector<double>{0.6, 0.4}) <= 0.05 + 1e-12);

  Codebook split;
  split.n = 10;
  split.nx = 2;
  for (int i = 0; i < 10; ++i) {
    std::vector<int> x(10, 0);
    for (int j = 0; j < (i < 7 ? 3 : 8); ++j) x[j] = 1;
    split.codewords.push_back(x);
  }
  auto s = cc_reduce(split, 0.05);
  CHECK(s.kept == std::vector<int>{0, 1, 2, 3, 4, 5, 6});

  Rng g(4);
  for (int t = 0; t < 100; ++t) {
    const int nx = 2 + uniform_index(g, 2), M = 1 + uniform_index(g, 60);
    const double lambda = 0.05 + 0.3 * uniform01(g);
    auto c = random_code(g, M, 5 + uniform_index(g, 20), nx);
    auto red = cc_reduce(c, lambda);
    CHECK(red.subcode.size() >= 1);
    CHECK(red.subcode.size() >= red.size_floor);
    // Largest cell >= M / (occupied cells), and occupied cells <= net size.
    CHECK(red.subcode.size() * red.cells >= M);
    CHECK(red.cells <= static_cast<long long>(simplex_net(nx, lambda).size()));
    for (const auto& x : red.subcode.codewords)
      CHECK(l1_distance(composition(x, nx).pmf(), red.P_hat.pmf()) <= lambda + 1e-12);
  }
  CHECK_THROWS_AS(cc_reduce(split, 0), ValidationError);
}

TEST_CASE("joint-type spectrum") {
  Codebook c;
  c.n = 4;
  c.nx = 2;
  c.codewords = {{0, 0, 1, 1}, {0, 1, 0, 1}, {1, 1, 1, 1}};
  CHECK(joint_type_spectrum(c, 3).size() == 1);
  auto s = joint_type_spectrum(c, 2);
  REQUIRE(s.size() == 3);
  // (0,1): pairs 00,01,10,11 once each.
  CHECK(s[0].pmf() == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  // (0,2): 01,01,11,11.
  CHECK(s[1].pmf() == std::vector<double>{0, 0.5, 0, 0.5});
  // (1,2): 01,11,01,11.
  CHECK(s[2].pmf() == std::vector<double>{0, 0.5, 0, 0.5});

  Rng g(9);
  auto r = random_code(g, 7, 6, 3);
  auto key = [](const std::vector<JointDist>& v) {
    std::multiset<std::vector<long long>> m;
    for (const auto& J : v) {
      // Tuple order is lost under reordering; compare orbit averages.
      std::vector<long long> k;
      for (double q : symmetrize(J).pmf()) k.push_back(std::llround(q * 36 * 6));
      m.insert(k);
    }
    return m;
  };
  auto base = key(joint_type_spectrum(r, 3));
  auto p = r;
  std::reverse(p.codewords.begin(), p.codewords.end());
  CHECK(key(joint_type_spectrum(p, 3)) == base);
  CHECK_THROWS_AS(joint_type_spectrum(random_code(g, 200, 4, 2), 3, 1000), BudgetExceeded);
}

TEST_CASE("codeword properties") {
  const int n = 40;
  auto code = sample_codebook(n, 16, {}, CondDist({1}, {Dist({0.5, 0.5})}), 5);
  Rng g(6);
  std::vector<int> s(n);
  for (auto& v : s) v = uniform_index(g, 2);
  auto rep = verify_cw_properties(code, {}, 1, s, 2, 0.05, 1);
  CHECK(rep.applicable);
  CHECK(rep.get("1").pass);
  CHECK(rep.get("2'").conditional);

  // Too few codewords for the precondition.
  auto small = verify_cw_properties(code, {}, 1, s, 2, 0.2, 1);
  CHECK_FALSE(small.applicable);
  CHECK_FALSE(small.get("1").applicable);

  // One codeword repeated: every codeword has a twin.
  auto rep2 = code;
  for (auto& x : rep2.codewords) x = code.codewords[0];
  auto bad = verify_cw_properties(rep2, {}, 1, s, 2, 0.05, 1);
  CHECK_FALSE(bad.get("2").pass);
  CHECK_FALSE(bad.get("2").violations.empty());
  CHECK_FALSE(bad.all_pass());

  // Property 3 and 3' only loosen as eps grows.
  for (double e : {0.02, 0.04, 0.06, 0.08}) {
    auto a = verify_cw_properties(code, {}, 1, s, 2, e, 2);
    auto b = verify_cw_properties(code, {}, 1, s, 2, e + 0.01, 2);
    if (a.applicable && b.applicable && a.get("3").pass) CHECK(b.get("3").pass);
    if (a.applicable && b.applicable && a.get("3'").pass) CHECK(b.get("3'").pass);
  }
}

TEST_CASE("time-sharing extraction recovers the generating sequence") {
  const int n = 30;
  std::vector<int> u(n);
  for (int j = 0; j < n; ++j) u[j] = (j * 7) % 3 == 0 ? 1 : 0;
  auto code = sample_codebook(n, 2000, u, CondDist({2}, {Dist({0.9, 0.1}), Dist({0.3, 0.7})}), 11);
  auto r = extract_timeshare_subcode(code, 0.1, 0.1);
  REQUIRE(r.nu == 2);
  std::map<int, int> m;
  bool bijective = true;
  for (int j = 0; j < n; ++j) {
    auto [it, fresh] = m.emplace(r.u_seq[j], u[j]);
    if (!fresh && it->second != u[j]) bijective = false;
  }
  CHECK(bijective);
  CHECK(r.meets_floor);
  // Generated codes are already chunk-wise constant composition.
  CHECK(r.subcode.size() == code.size());

  Codebook flat;
  flat.n = 8;
  flat.nx = 2;
  flat.codewords.assign(5, std::vector<int>{0, 1, 0, 1, 1, 0, 0, 1});
  auto f = extract_timeshare_subcode(flat, 0.1, 0.1);
  CHECK(f.nu == 2);  // columns are all-0 or all-1
  CHECK(f.subcode.codewords == flat.codewords);
  Codebook cst;
  cst.n = 6;
  cst.nx = 2;
  cst.codewords.assign(4, std::vector<int>(6, 1));
  auto k = extract_timeshare_subcode(cst, 0.1, 0.1);
  CHECK(k.nu == 1);
  CHECK(k.subcode.codewords == cst.codewords);

  Rng g(13);
  for (int t = 0; t < 50; ++t) {
    auto c = random_code(g, 20 + uniform_index(g, 60), 6 + uniform_index(g, 10), 2);
    auto e = extract_timeshare_subcode(c, 0.2, 0.25);
    CHECK(e.subcode.size() >= 1);
    CHECK(e.theta >= e.theta_bound);
    for (int uu = 0; uu < e.nu; ++uu) {
      std::vector<int> pos;
      for (int j = 0; j < c.n; ++j)
        if (e.u_seq[j] == uu) pos.push_back(j);
      auto first = composition(e.subcode.codewords[0], 2, pos);
      for (const auto& x : e.subcode.codewords)
        CHECK(l1_distance(composition(x, 2, pos).pmf(), first.pmf()) <= 2 * 0.25 + 1e-12);
    }
  }
}

TEST_CASE("lists generate enough sublists") {
  auto all = [](int M, int size) {
    std::vector<std::vector<int>> out;
    for (unsigned m = 0; m < (1u << M); ++m)
      if (std::popcount(m) == size) {
        std::vector<int> l;
        for (int i = 0; i < M; ++i)
          if (m >> i & 1u) l.push_back(i);
        out.push_back(l);
      }
    return out;
  };
  for (int M = 3; M <= 7; ++M)
    for (int L = 1; L < M; ++L) {
      auto f = list_generation_fact(M, L, all(M, L + 1));
      CHECK(f.generated == static_cast<long long>(all(M, L).size()));
      CHECK(f.holds);
    }
  auto one = list_generation_fact(6, 2, {{0, 3, 5}});
  CHECK(one.generated == 3);
  CHECK(one.holds);

  Rng g(14);
  for (int t = 0; t < 300; ++t) {
    const int M = 3 + uniform_index(g, 8), L = 1 + uniform_index(g, M - 2);
    auto cand = all(M, L + 1);
    std::vector<std::vector<int>> fam;
    for (const auto& l : cand)
      if (uniform01(g) < 0.3) fam.push_back(l);
    if (fam.empty()) continue;
    // Oracle: count L-subsets contained in some member.
    long long gen = 0;
    for (const auto& s : all(M, L))
      for (const auto& l : fam)
        if (std::includes(l.begin(), l.end(), s.begin(), s.end())) {
          ++gen;
          break;
        }
    auto f = list_generation_fact(M, L, fam);
    CHECK(f.generated == gen);
    CHECK(f.holds);
  }
  CHECK_THROWS_AS(list_generation_fact(4, 1, {{0, 0}}), ValidationError);
}
