#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "avc/cpcone.hpp"
#include "avc/rng.hpp"

using namespace avc;

namespace {

Dist random_dist(Rng& g, int k) {
  std::vector<double> v(k);
  double s = 0;
  for (auto& x : v) s += (x = -std::log(1.0 - uniform01(g)));
  for (auto& x : v) x /= s;
  return Dist(v);
}

CpDecomposition random_decomposition(Rng& g, int nx, int L) {
  int k = 1 + uniform_index(g, 3);
  CpDecomposition d;
  d.weights = random_dist(g, k);
  for (int i = 0; i < k; ++i) d.factors.push_back(random_dist(g, nx));
  d.order = L;
  return d;
}

JointDist random_joint(Rng& g, int nx, int L) {
  return JointDist(std::vector<int>(L, nx), tuple_axes(L), random_dist(g, static_cast<int>(ipow(nx, L))).pmf());
}

Codebook random_code(Rng& g, int M, int n, int nx) {
  Codebook c;
  c.n = n;
  c.nx = nx;
  c.codewords.assign(M, std::vector<int>(n));
  for (auto& w : c.codewords)
    for (auto& v : w) v = uniform_index(g, nx);
  return c;
}

JointDist anti_diagonal() { return JointDist({2, 2}, tuple_axes(2), {0.0, 0.5, 0.5, 0.0}); }

}  // namespace

TEST_CASE("synthesis") {
  CpDecomposition d{Dist({0.5, 0.5}), {Dist({1.0, 0.0}), Dist({0.0, 1.0})}, 2};
  auto J = cp_synthesize(d);
  CHECK(J.pmf() == std::vector<double>{0.5, 0.0, 0.0, 0.5});

  auto P = Dist({0.2, 0.3, 0.5});
  CpDecomposition one{Dist({1.0}), {P}, 3};
  CHECK(l1_distance(cp_synthesize(one).pmf(), tensor_power(P, 3).pmf()) < 1e-15);

  Rng g(11);
  for (int t = 0; t < 50; ++t) {
    int nx = 2 + uniform_index(g, 2), L = 2 + uniform_index(g, 2);
    auto dd = random_decomposition(g, nx, L);
    auto JJ = cp_synthesize(dd);
    auto m = dd.marginal();
    for (int i = 0; i < L; ++i) CHECK(l1_distance(axis_marginal(JJ, i).pmf(), m.pmf()) < 1e-12);
    CHECK(asymmetry(JJ) < 1e-12);
  }
}

TEST_CASE("asymmetry and symmetrize") {
  JointDist up({2, 2}, tuple_axes(2), {0.0, 1.0, 0.0, 0.0});
  CHECK(asymmetry(up) == doctest::Approx(1.0));
  CHECK(symmetrize(up).pmf() == std::vector<double>{0.0, 0.5, 0.5, 0.0});
  auto s = anti_diagonal();
  CHECK(asymmetry(s) == 0.0);
  CHECK(symmetrize(s).pmf() == s.pmf());

  Rng g(3);
  for (int t = 0; t < 100; ++t) {
    int nx = 2 + uniform_index(g, 2), L = 2 + uniform_index(g, 2);
    auto J = random_joint(g, nx, L);
    auto S = symmetrize(J);
    CHECK(asymmetry(S) < 1e-12);
    double bound = static_cast<double>(ipow(nx, L) - nx) * asymmetry(J);
    CHECK(l1_distance(J.pmf(), S.pmf()) <= bound + 1e-12);
  }
}

TEST_CASE("distance to cp") {
  auto P = Dist({0.4, 0.6});
  CpDistanceOptions opt;
  opt.net_resolution = 0.1;
  auto d = distance_to_cp(tensor_power(P, 2), P, opt);
  CHECK(d.distance < 1e-9);

  auto anti = distance_to_cp(anti_diagonal(), Dist({0.5, 0.5}), opt);
  CHECK(anti.distance > 0.5);
  auto nearest = cp_synthesize(anti.nearest);
  CHECK(l1_distance(nearest.pmf(), anti_diagonal().pmf()) == doctest::Approx(anti.distance).epsilon(1e-6));

  Rng g(5);
  CpDistanceOptions fine;
  for (int t = 0; t < 30; ++t) {
    int nx = 2 + uniform_index(g, 2), L = 2;
    auto dd = random_decomposition(g, nx, L);
    auto r = distance_to_cp(cp_synthesize(dd), dd.marginal(), fine);
    CHECK(r.distance <= r.net_error + 1e-9);
  }
  // 1-Lipschitz in J on perturbed pairs.
  for (int t = 0; t < 30; ++t) {
    auto A = random_joint(g, 2, 2), B = random_joint(g, 2, 2);
    auto Pm = Dist({0.5, 0.5});
    CpDistanceOptions wide;
    wide.net_resolution = 0.1;
    wide.marginal_slack = 2.0;
    double da = distance_to_cp(A, Pm, wide).distance, db = distance_to_cp(B, Pm, wide).distance;
    CHECK(std::abs(da - db) <= l1_distance(A.pmf(), B.pmf()) + 1e-9);
  }
}

TEST_CASE("copositive witness on the anti-diagonal") {
  auto w = copositive_witness(anti_diagonal(), Dist({0.5, 0.5}));
  REQUIRE(w.has_value());
  CHECK(w->certifies());
  CHECK(w->margin >= 0.5);
  CHECK(w->value == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(w->net_min >= -1e-9);
  // Perfect square witness: (p0 - p1)^2 on every distribution.
  auto sq = square_witness(anti_diagonal());
  REQUIRE(sq.has_value());
  CHECK(sq->exact);
  for (double p = 0; p <= 1.0; p += 0.05) CHECK(copositive_form(*sq, Dist({p, 1 - p}, 1e-9)) >= -1e-12);
  CHECK(witness_inner(*sq, anti_diagonal()) < 0);
}

TEST_CASE("no witness for product laws") {
  auto P = Dist({0.3, 0.7});
  CHECK_FALSE(copositive_witness(tensor_power(P, 2), P).has_value());
  CHECK_FALSE(square_witness(tensor_power(P, 2)).has_value());
  auto Q = Dist({0.2, 0.3, 0.5});
  CHECK_FALSE(copositive_witness(tensor_power(Q, 3), Q, 0.1).has_value());
}

TEST_CASE("double counting against a naive loop") {
  Codebook c;
  c.n = 4;
  c.nx = 2;
  c.codewords = {{0, 1, 1, 0}, {1, 1, 0, 0}, {0, 0, 0, 1}};
  CopositiveWitness w;
  w.nx = 2;
  w.order = 2;
  w.Q = {1.0, -1.0, -1.0, 1.0};
  auto r = double_counting(c, w);
  double naive = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int j = 0; j < 4; ++j) naive += w.Q[c.codewords[a][j] * 2 + c.codewords[b][j]] / 4.0;
  CHECK(r.lhs == doctest::Approx(naive).epsilon(1e-14));
  CHECK(std::abs(r.lhs - r.rhs) <= 1e-9);
  CHECK(r.lhs >= -1e-9);

  Rng g(21);
  for (int t = 0; t < 50; ++t) {
    int M = 1 + uniform_index(g, 8), n = 1 + uniform_index(g, 12), L = 2 + uniform_index(g, 2);
    auto code = random_code(g, M, n, 2);
    CopositiveWitness q;
    q.nx = 2;
    q.order = L;
    q.Q.resize(ipow(2, L));
    for (auto& v : q.Q) v = 2 * uniform01(g) - 1;
    auto dc = double_counting(code, q);
    CHECK(std::abs(dc.lhs - dc.rhs) <= 1e-9);
  }
}

TEST_CASE("cp extraction") {
  Codebook same;
  same.n = 10;
  same.nx = 2;
  same.codewords.assign(5, {0, 1, 1, 0, 1, 0, 0, 0, 1, 1});
  auto r = cp_extraction_fraction(same, Dist({0.5, 0.5}), 0.05, 2, 3);
  CHECK(r.fraction == 1.0);
  CHECK(r.subsets == 10);
  CHECK(r.turan_density_cap == doctest::Approx(2.0 / 3));
  CHECK(r.nu_floor == doctest::Approx(1.0 / 3));

  // Constant composition (1/2, 1/2): uniform random permutations of one word.
  Rng g(8);
  Codebook iid;
  iid.n = 200;
  iid.nx = 2;
  std::vector<int> base(200, 0);
  std::fill(base.begin() + 100, base.end(), 1);
  for (int m = 0; m < 40; ++m) {
    shuffle_in_place(g, base);
    iid.codewords.push_back(base);
  }
  CpDistanceOptions opt;
  opt.net_resolution = 0.05;
  // Oracle: a balanced binary pair type [[a, b], [b, a]] is cp iff a >= 1/4,
  // and its l1 distance to the cp laws with marginal (1/2, 1/2) is 4(1/4 - a).
  for (double eps : {0.1, 0.2}) {
    int close = 0, pairs = 0;
    for (int i = 0; i < 40; ++i)
      for (int j = i + 1; j < 40; ++j) {
        int zz = 0;
        for (int t = 0; t < 200; ++t) zz += iid.codewords[i][t] == 0 && iid.codewords[j][t] == 0;
        close += std::max(0.0, 4 * (0.25 - zz / 200.0)) <= eps + 1e-9;
        ++pairs;
      }
    auto f = cp_extraction_fraction(iid, Dist({0.5, 0.5}), eps, 2, 0, opt);
    CHECK(f.fraction == doctest::Approx(static_cast<double>(close) / pairs));
    if (eps == 0.2) CHECK(f.fraction >= 0.99);
  }
}

TEST_CASE("product characterization") {
  auto P = Dist({0.3, 0.7});
  CHECK(product_characterization_check(P, tensor_power(P, 2), 2));
  CHECK(product_characterization_check(P, anti_diagonal(), 2));
  // Grid search: hypothesis-satisfying Q must be P^2.
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; a + b <= 10; ++b)
      for (int c = 0; a + b + c <= 10; ++c) {
        JointDist Q({2, 2}, tuple_axes(2), {a / 10.0, b / 10.0, c / 10.0, (10 - a - b - c) / 10.0}, 1e-9);
        CHECK(product_characterization_check(Dist({0.5, 0.5}), Q, 2));
      }
}
