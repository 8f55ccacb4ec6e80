#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "avc/channel.hpp"
#include "avc/rng.hpp"

using namespace avc;

namespace {

std::string data_path(const std::string& name) { return std::string(AVC_SOURCE_DIR) + "/data/" + name; }

ObliviousAVC noisy_avc() {
  // |X|=2, |S|=3, |Y|=3, W[y][x][s]
  std::vector<double> w = {0.7, 0.1, 0.2, 0.3, 0.3, 0.5,  //
                           0.2, 0.6, 0.3, 0.3, 0.4, 0.1,  //
                           0.1, 0.3, 0.5, 0.4, 0.3, 0.4};
  return make_avc(2, 3, 3, w, ConstraintPolytope::unconstrained(2),
                  StateConstraint::from_polytope(ConstraintPolytope(3, {{0, 1, 1}}, {0.4})));
}

}  // namespace

TEST_CASE("json round trip") {
  auto a = noisy_avc();
  auto b = avc_from_json(avc_to_json(a));
  CHECK(approx_equal(a, b));
  auto tmp = std::filesystem::temp_directory_path() / "avc_rt.json";
  save_spec(a, tmp.string());
  CHECK(approx_equal(a, load_spec(tmp.string())));
  std::filesystem::remove(tmp);
}

TEST_CASE("row that does not sum to one names the row") {
  auto j = avc_to_json(bitflip_avc(0.1));
  j["W"][0][0][1] = 0.9;  // W(y=0|x=0,s=1)
  j["W"][1][0][1] = 0.0;
  try {
    avc_from_json(j);
    FAIL("accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("row (x=0, s=1) sums to 0.9, not 1") != std::string::npos);
  }
}

TEST_CASE("probabilities as strings and fractions") {
  CHECK(parse_probability("1/3", "p") == doctest::Approx(1.0 / 3));
  CHECK(parse_probability("0.25", "p") == 0.25);
  CHECK(parse_probability(0.5, "p") == 0.5);
  CHECK_THROWS_AS(parse_probability("1/0", "p"), ValidationError);
  CHECK_THROWS_AS(parse_probability("abc", "p"), ValidationError);
}

TEST_CASE("shipped demo spec loads") {
  auto a = load_spec(data_path("bitflip.json"));
  CHECK(approx_equal(a, bitflip_avc(0.1)));
  CHECK(a.S.label(1) == "flip");
  auto f = load_spec(data_path("bitflip_free.json"));
  CHECK(f.lambda_s.polytope.rows() == 0);
}

TEST_CASE("bitflip with the all-zero state is noiseless") {
  auto a = bitflip_avc(0.1);
  std::vector<int> x = {0, 1, 1, 0, 1, 0, 0, 1}, s(8, 0);
  CHECK(apply_channel(a, x, s, 7) == x);
  std::vector<int> s1(8, 1);
  auto y = apply_channel(a, x, s1, 7);
  for (int i = 0; i < 8; ++i) CHECK(y[i] == 1 - x[i]);
}

TEST_CASE("sampling matches W") {
  auto a = noisy_avc();
  const int n = 100000;
  std::vector<int> x(n, 1), s(n, 2);
  auto y = apply_channel(a, x, s, 12345);
  std::vector<double> freq(3, 0.0);
  for (int v : y) freq[v] += 1.0 / n;
  for (int v = 0; v < 3; ++v) {
    double p = a.w(v, 1, 2), sd = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(freq[v] - p) < 5 * sd);
  }
  CHECK(apply_channel(a, x, s, 12345) == y);
}

TEST_CASE("output distribution matches a naive product") {
  auto a = noisy_avc();
  for (int n = 1; n <= 3; ++n) {
    std::vector<int> x(n), s(n);
    for (int i = 0; i < n; ++i) {
      x[i] = i % 2;
      s[i] = (i * 2 + 1) % 3;
    }
    auto J = output_distribution(a, x, s);
    std::vector<int> shape(n, 3), y;
    for (long long f = 0; f < ipow(3, n); ++f) {
      unflatten(f, shape, y);
      double p = 1;
      for (int i = 0; i < n; ++i) p *= a.w(y[i], x[i], s[i]);
      CHECK(J.at(y) == doctest::Approx(p).epsilon(1e-14));
    }
  }
}

TEST_CASE("induced DMC rows") {
  auto a = noisy_avc();
  CondDist U({2}, {Dist({0.5, 0.5, 0.0}), Dist({0.0, 0.25, 0.75})});
  auto d = induced_dmc(a, U, Dist({0.4, 0.6}));
  CHECK(d.nu == 2);
  for (int u = 0; u < 2; ++u)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y) {
        double e = 0;
        for (int s = 0; s < 3; ++s) e += U(u, s) * a.w(y, x, s);
        CHECK(d.w(y, x, u) == doctest::Approx(e));
      }
}

TEST_CASE("codebook validation and round trip") {
  Codebook c;
  c.n = 4;
  c.nx = 2;
  c.codewords = {{0, 1, 0, 1}, {1, 1, 0, 0}};
  c.validate();
  CHECK(c.rate() == doctest::Approx(0.25));
  auto d = codebook_from_json(codebook_to_json(c));
  CHECK(d.codewords == c.codewords);
  c.codewords[1].push_back(1);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.codewords[1] = {1, 2, 0, 0};
  CHECK_THROWS_AS(c.validate(), ValidationError);
}
