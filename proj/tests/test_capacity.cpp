#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "avc/canonical.hpp"
#include "avc/capacity.hpp"
#include "avc/rng.hpp"

using namespace avc;

namespace {

double h2(double p) { return p <= 0 || p >= 1 ? 0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

Dist random_dist(Rng& g, int n) {
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) s += (x = 0.05 + uniform01(g));
  for (auto& x : v) x /= s;
  return Dist(v);
}

CondDist random_cond(Rng& g, int rows, int out) {
  std::vector<Dist> r;
  for (int i = 0; i < rows; ++i) r.push_back(random_dist(g, out));
  return CondDist({rows}, std::move(r));
}

ObliviousAVC random_avc(Rng& g, int nx, int ns, int ny, ConstraintPolytope ls) {
  ObliviousAVC a;
  a.X = Alphabet(nx);
  a.S = Alphabet(ns);
  a.Y = Alphabet(ny);
  std::vector<Dist> rows;
  for (int i = 0; i < nx * ns; ++i) rows.push_back(random_dist(g, ny));
  a.W = CondDist({nx, ns}, std::move(rows));
  a.lambda_x = ConstraintPolytope::unconstrained(nx);
  a.lambda_s = StateConstraint::from_polytope(std::move(ls));
  return a;
}

// I(x;y) for an input law p through a DMC, straight from the definition.
double mi_direct(const std::vector<double>& p, const std::vector<std::vector<double>>& W) {
  const int ny = static_cast<int>(W[0].size());
  std::vector<double> q(ny, 0.0);
  for (std::size_t x = 0; x < p.size(); ++x)
    for (int y = 0; y < ny; ++y) q[y] += p[x] * W[x][y];
  double r = 0;
  for (std::size_t x = 0; x < p.size(); ++x)
    for (int y = 0; y < ny; ++y)
      if (p[x] > 0 && W[x][y] > 0) r += p[x] * W[x][y] * std::log2(W[x][y] / q[y]);
  return r;
}

}  // namespace

TEST_CASE("constrained bitflip inner minimum") {
  const Dist half({0.5, 0.5});
  for (double p : {0.05, 0.1, 0.2}) {
    auto r = inner_min(bitflip_avc(p), Dist({1.0}), CondDist({1}, {half}));
    CHECK(std::abs(r.value - (1 - h2(p))) < 1e-4);
    CHECK(std::abs(r.U(0, 1) - p) < 1e-3);
    CHECK_FALSE(r.inner_approximation);
  }
  CHECK(std::abs(inner_min(bitflip_avc(0.1), Dist({1.0}), CondDist({1}, {half})).value - 0.5310) < 1e-4);
  auto free = inner_min(bitflip_avc(1.0), Dist({1.0}), CondDist({1}, {half}));
  CHECK(free.value < 1e-6);
  CHECK(std::abs(free.U(0, 1) - 0.5) < 1e-3);
}

TEST_CASE("infeasible state set") {
  auto a = bitflip_avc(0.1);
  a.lambda_s = StateConstraint::from_polytope(ConstraintPolytope(2, {{1, 1}}, {0.5}));
  CHECK_THROWS_AS(inner_min(a, Dist({1.0}), CondDist({1}, {Dist({0.5, 0.5})})), ValidationError);
}

TEST_CASE("noiseless channel ignores the state") {
  Rng g(3);
  auto a = random_avc(g, 2, 3, 2, ConstraintPolytope::unconstrained(3));
  std::vector<Dist> rows;
  for (int x = 0; x < 2; ++x)
    for (int s = 0; s < 3; ++s) rows.push_back(Dist::point(2, x));
  a.W = CondDist({2, 3}, std::move(rows));
  auto P = Dist({0.3, 0.7});
  CHECK(std::abs(inner_min(a, Dist({1.0}), CondDist({1}, {P})).value - h2(0.3)) < 1e-9);
}

TEST_CASE("inner minimum against a grid on three states") {
  Rng g(11);
  for (int t = 0; t < 4; ++t) {
    auto a = random_avc(g, 2, 3, 2, ConstraintPolytope(3, {{0, 0.5 + uniform01(g), 1}}, {0.4}));
    auto P = random_dist(g, 2);
    auto obj = [&](double u0, double u1) {
      std::vector<std::vector<double>> V(2, std::vector<double>(2, 0.0));
      const double U[3] = {u0, u1, 1 - u0 - u1};
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int s = 0; s < 3; ++s) V[x][y] += U[s] * a.w(y, x, s);
      return mi_direct(P.pmf(), V);
    };
    auto feasible = [&](double u0, double u1) {
      double u2 = 1 - u0 - u1;
      return u0 >= -1e-12 && u1 >= -1e-12 && u2 >= -1e-12 &&
             a.lambda_s.polytope.A[0][1] * u1 + u2 <= 0.4 + 1e-12;
    };
    double best = 1e9, b0 = 0, b1 = 0;
    auto scan = [&](double lo0, double hi0, double lo1, double hi1, double step) {
      for (double u0 = lo0; u0 <= hi0 + 1e-12; u0 += step)
        for (double u1 = lo1; u1 <= hi1 + 1e-12; u1 += step)
          if (feasible(u0, u1)) {
            double v = obj(u0, u1);
            if (v < best) best = v, b0 = u0, b1 = u1;
          }
    };
    scan(0, 1, 0, 1, 0.005);
    scan(std::max(0.0, b0 - 0.006), b0 + 0.006, std::max(0.0, b1 - 0.006), b1 + 0.006, 5e-5);
    auto r = inner_min(a, Dist({1.0}), CondDist({1}, {P}));
    CHECK(r.value <= best + 1e-9);
    CHECK(std::abs(r.value - best) < 1e-4);
    CHECK(std::abs(conditional_mi(a, Dist({1.0}), CondDist({1}, {P}), r.U) - r.value) < 1e-12);
  }
}

TEST_CASE("mutual information is convex in the kernel") {
  Rng g(5);
  for (int t = 0; t < 30; ++t) {
    auto a = random_avc(g, 3, 3, 3, ConstraintPolytope::unconstrained(3));
    auto Pu = random_dist(g, 2);
    auto Px = random_cond(g, 2, 3);
    auto U1 = random_cond(g, 2, 3), U2 = random_cond(g, 2, 3);
    std::vector<Dist> mid;
    for (int u = 0; u < 2; ++u) {
      std::vector<double> m(3);
      for (int s = 0; s < 3; ++s) m[s] = 0.5 * (U1(u, s) + U2(u, s));
      mid.emplace_back(m);
    }
    double f1 = conditional_mi(a, Pu, Px, U1), f2 = conditional_mi(a, Pu, Px, U2);
    double fm = conditional_mi(a, Pu, Px, CondDist({2}, mid));
    CHECK(fm <= 0.5 * (f1 + f2) + 1e-12);
    // The minimum never exceeds any feasible kernel's value.
    auto r = inner_min(a, Pu, Px);
    CHECK(r.value <= std::min({f1, f2, fm}) + 1e-9);
  }
}

TEST_CASE("list capacity estimate on bitflip") {
  auto est = capacity_lower_bound(bitflip_avc(0.1), 1);
  CHECK_FALSE(est.all_symmetrizable);
  CHECK(est.admissible > 0);
  CHECK(std::abs(est.value - 0.5310) < 1e-3);
  for (int L : {1, 2}) {
    auto free = capacity_lower_bound(bitflip_avc(1.0), L);
    CHECK(free.all_symmetrizable);
    CHECK(free.value == 0);
  }
}

TEST_CASE("canonical channel beyond its order has positive capacity") {
  auto a = build_canonical(demo_pset(), 1);
  auto est = capacity_lower_bound(a, 2);
  CHECK_FALSE(est.all_symmetrizable);
  CHECK(est.value > 0.01);
  auto at = capacity_lower_bound(a, 1);
  CHECK(at.admissible == 0);
}

TEST_CASE("bracket on bitflip") {
  auto b = sarwate_gastpar_bounds(bitflip_avc(0.1), 1);
  CHECK(std::abs(b.upper - 0.5310) < 1e-3);
  CHECK(std::abs(b.lower - 0.5310) < 1e-3);
  auto est = capacity_lower_bound(bitflip_avc(0.1), 1);
  CHECK(b.lower <= est.value + 1e-4);
  CHECK(est.value <= b.upper + 1e-4);
  auto free = sarwate_gastpar_bounds(bitflip_avc(1.0), 2);
  CHECK(free.upper_all_symmetrizable);
  CHECK(free.lower_all_symmetrizable);
}

TEST_CASE("fading capacity") {
  FadingDMC f;
  f.nx = f.ny = 2;
  f.nu = 2;
  f.P_u = Dist({0.5, 0.5});
  f.W = CondDist({4}, {Dist({0.9, 0.1}), Dist({0.1, 0.9}), Dist({0.8, 0.2}), Dist({0.2, 0.8})});
  auto c = fading_capacity(f);
  const double closed = 0.5 * (1 - h2(0.1)) + 0.5 * (1 - h2(0.2));
  CHECK(std::abs(closed - 0.40454) < 1e-5);
  CHECK(std::abs(c.value - closed) < 1e-9);
  CHECK(std::abs(c.P_x_given_u(1, 0) - 0.5) < 1e-9);

  FadingDMC n;
  n.nx = n.ny = 2;
  n.nu = 1;
  n.P_u = Dist({1.0});
  n.W = CondDist({2}, {Dist::point(2, 0), Dist::point(2, 1)});
  CHECK(std::abs(fading_capacity(n).value - 1.0) < 1e-9);

  f.P_u = Dist({1.0, 0.0});
  CHECK_THROWS_AS(fading_capacity(f), ValidationError);
}

TEST_CASE("single-block fading equals DMC capacity") {
  Rng g(8);
  for (int t = 0; t < 20; ++t) {
    auto W = random_cond(g, 2, 3);
    std::vector<std::vector<double>> Wv = {W.row(0).pmf(), W.row(1).pmf()};
    // Independent oracle: I is concave in p, so ternary search over P(x=0).
    double lo = 0, hi = 1;
    for (int i = 0; i < 200; ++i) {
      double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (mi_direct({m1, 1 - m1}, Wv) < mi_direct({m2, 1 - m2}, Wv)) lo = m1;
      else hi = m2;
    }
    const double oracle = mi_direct({lo, 1 - lo}, Wv);
    FadingDMC f;
    f.nx = 2;
    f.ny = 3;
    f.nu = 1;
    f.P_u = Dist({1.0});
    f.W = W;
    CHECK(std::abs(fading_capacity(f).value - oracle) < 1e-6);
    CHECK(std::abs(dmc_capacity(W) - oracle) < 1e-6);
  }
}

TEST_CASE("chain inequality") {
  Rng g(12);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const int nx = 2 + uniform_index(g, 2), ns = 2 + uniform_index(g, 2), ny = 2 + uniform_index(g, 2);
    const int L = 1 + uniform_index(g, 2), nu = 1 + uniform_index(g, 2);
    auto a = random_avc(g, nx, ns, ny, ConstraintPolytope::unconstrained(ns));
    JammingKernel k;
    k.L = L;
    k.nu = nu;
    k.U = random_cond(g, nu * static_cast<int>(ipow(nx, L)), ns);
    auto c = chain_inequality_check(a, random_dist(g, nu), random_cond(g, nu, nx), k);
    CHECK(c.holds);
    CHECK(c.conditioned - c.plain >= -1e-9);
    ++checked;
  }
  CHECK(checked == 200);

  // Kernel that ignores the list: both sides agree.
  auto a = bitflip_avc(0.1);
  JammingKernel k;
  k.L = 2;
  k.U = CondDist({4}, std::vector<Dist>(4, Dist({0.7, 0.3})));
  auto c = chain_inequality_check(a, Dist({1.0}), CondDist({1}, {Dist({0.4, 0.6})}), k);
  CHECK(std::abs(c.conditioned - c.plain) < 1e-12);

  // Deterministic channel independent of everything: both zero.
  JointDist flat({1, 2, 2, 2}, {"u", "x", "x1", "y"}, std::vector<double>(8, 0.125));
  auto z = chain_inequality_check(flat, 1);
  CHECK(std::abs(z.conditioned) < 1e-12);
  CHECK(std::abs(z.plain) < 1e-12);

  // x1 copies x: structure violated.
  std::vector<double> pm(8, 0.0);
  pm[(0 * 2 + 0) * 2 + 0] = 0.25;
  pm[(0 * 2 + 0) * 2 + 1] = 0.25;
  pm[(1 * 2 + 1) * 2 + 0] = 0.25;
  pm[(1 * 2 + 1) * 2 + 1] = 0.25;
  JointDist bad({1, 2, 2, 2}, {"u", "x", "x1", "y"}, pm);
  CHECK_THROWS_AS(chain_inequality_check(bad, 1), ValidationError);
}
