#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "avc/lp.hpp"
#include "avc/rng.hpp"

using namespace avc;

TEST_CASE("trivial bounds") {
  LinearProgram lp(1);
  lp.upper[0] = 1.0;
  lp.objective = {1.0};
  auto r = lp_solve(lp);
  REQUIRE(r.feasible());
  CHECK(r.value == doctest::Approx(0.0));

  lp.objective = {-1.0};
  r = lp_solve(lp);
  CHECK(r.value == doctest::Approx(-1.0));

  LinearProgram bad(1);
  bad.lower[0] = 1.0;
  bad.upper[0] = 0.0;
  CHECK(lp_solve(bad).status == LpStatus::infeasible);
}

TEST_CASE("unbounded and infeasible") {
  LinearProgram lp(2);
  lp.objective = {-1.0, 0.0};
  lp.add_le({{1, 1.0}}, 3.0);
  CHECK(lp_solve(lp).status == LpStatus::unbounded);

  LinearProgram inf(2);
  inf.add_eq({{0, 1.0}, {1, 1.0}}, 1.0);
  inf.add_ge({{0, 1.0}}, 0.7);
  inf.add_ge({{1, 1.0}}, 0.7);
  CHECK(lp_solve(inf).status == LpStatus::infeasible);
}

TEST_CASE("negative lower bounds and ge rows") {
  // min x + y s.t. x - y >= -2, x >= -1, y >= -5, x + y >= -3.
  LinearProgram lp(2);
  lp.lower = {-1.0, -5.0};
  lp.objective = {1.0, 1.0};
  lp.add_ge({{0, 1.0}, {1, -1.0}}, -2.0);
  lp.add_ge({{0, 1.0}, {1, 1.0}}, -3.0);
  auto r = lp_solve(lp);
  REQUIRE(r.feasible());
  CHECK(r.value == doctest::Approx(-3.0));
  CHECK(lp_max_violation(lp, r.x) < 1e-9);
}

// Vertex enumeration oracle: every basic solution of the 3x3 transportation
// polytope is found by choosing 5 basic cells and solving the margin system.
TEST_CASE("transportation LPs against vertex enumeration") {
  Rng g(42);
  for (int trial = 0; trial < 30; ++trial) {
    double a[3], b[3], c[9];
    double sa = 0, sb = 0;
    for (double& v : a) sa += (v = 0.2 + uniform01(g));
    for (double& v : b) sb += (v = 0.2 + uniform01(g));
    for (double& v : a) v /= sa;
    for (double& v : b) v /= sb;
    for (double& v : c) v = uniform01(g) * 10 - 3;

    LinearProgram lp(9);
    lp.objective.assign(c, c + 9);
    for (int i = 0; i < 3; ++i) lp.add_eq({{3 * i, 1.0}, {3 * i + 1, 1.0}, {3 * i + 2, 1.0}}, a[i]);
    for (int j = 0; j < 3; ++j) lp.add_eq({{j, 1.0}, {3 + j, 1.0}, {6 + j, 1.0}}, b[j]);
    auto r = lp_solve(lp);
    REQUIRE(r.feasible());
    CHECK(lp_max_violation(lp, r.x) < 1e-9);

    double best = INFINITY;
    for (int mask = 0; mask < 512; ++mask) {
      if (__builtin_popcount(mask) != 5) continue;
      std::vector<int> cells;
      for (int k = 0; k < 9; ++k)
        if (mask >> k & 1) cells.push_back(k);
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 5);
      Eigen::VectorXd rhs(6);
      for (int i = 0; i < 3; ++i) rhs(i) = a[i];
      for (int j = 0; j < 3; ++j) rhs(3 + j) = b[j];
      for (int q = 0; q < 5; ++q) {
        m(cells[q] / 3, q) = 1;
        m(3 + cells[q] % 3, q) = 1;
      }
      Eigen::VectorXd x = m.colPivHouseholderQr().solve(rhs);
      if ((m * x - rhs).norm() > 1e-9) continue;
      if (x.minCoeff() < -1e-12) continue;
      double v = 0;
      for (int q = 0; q < 5; ++q) v += c[cells[q]] * x(q);
      best = std::min(best, v);
    }
    CHECK(r.value == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("degenerate redundant equalities") {
  LinearProgram lp(3);
  lp.objective = {1.0, 2.0, 3.0};
  lp.add_eq({{0, 1.0}, {1, 1.0}, {2, 1.0}}, 1.0);
  lp.add_eq({{0, 2.0}, {1, 2.0}, {2, 2.0}}, 2.0);
  lp.add_eq({{0, 1.0}, {1, -1.0}}, 0.0);
  auto r = lp_solve(lp);
  REQUIRE(r.feasible());
  CHECK(r.value == doctest::Approx(1.5));
}
