// Channel models, memoryless application and the JSON file formats.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avc/probkit.hpp"
#include "json.hpp"

namespace avc {

struct StateConstraint {
  enum class Kind { polytope, cp_union };

  Kind kind = Kind::polytope;
  ConstraintPolytope polytope;  // over S, polytope kind
  ConstraintPolytope p_set;     // over X, cp-union kind
  int order = 1;                // cp-union: S = X^order
  double tol = 1e-6;

  static StateConstraint from_polytope(ConstraintPolytope k);
  static StateConstraint cp_union(ConstraintPolytope p_set, int order, double tol = 1e-6);
  bool is_polytope() const { return kind == Kind::polytope; }
};

struct ObliviousAVC {
  Alphabet X, S, Y;
  CondDist W;  // row x*|S| + s, output y
  ConstraintPolytope lambda_x;
  StateConstraint lambda_s;

  int nx() const { return X.size; }
  int ns() const { return S.size; }
  int ny() const { return Y.size; }
  double w(int y, int x, int s) const { return W(x * S.size + s, y); }
  void validate() const;
};

ObliviousAVC make_avc(int nx, int ns, int ny, const std::vector<double>& w_yxs,
                      ConstraintPolytope lambda_x, StateConstraint lambda_s);

// W(y|x,u), rows u*|X| + x.
struct FadingDMC {
  int nx = 0, ny = 0, nu = 0;
  CondDist W;
  Dist P_u;
  std::vector<int> u_seq;

  double w(int y, int x, int u) const { return W(u * nx + x, y); }
};

struct Codebook {
  int n = 0;
  int nx = 2;
  std::vector<std::vector<int>> codewords;
  std::vector<int> u_seq;  // empty when absent
  int nu = 1;

  int size() const { return static_cast<int>(codewords.size()); }
  double rate() const;
  void validate() const;
};

std::vector<int> apply_channel(const ObliviousAVC& avc, const std::vector<int>& x,
                               const std::vector<int>& s, std::uint64_t seed);

// Exact law of y^n; axes y0..y{n-1}.
JointDist output_distribution(const ObliviousAVC& avc, const std::vector<int>& x,
                              const std::vector<int>& s, long long budget = kDefaultBudget);

// U indexed [u] -> s.
FadingDMC induced_dmc(const ObliviousAVC& avc, const CondDist& U, const Dist& P_u);

// The constrained bitflip law y = x xor s with P_s(1) <= p (p >= 1: unconstrained).
ObliviousAVC bitflip_avc(double p);

nlohmann::json avc_to_json(const ObliviousAVC& avc);
ObliviousAVC avc_from_json(const nlohmann::json& j);
ObliviousAVC load_spec(const std::string& path);
void save_spec(const ObliviousAVC& avc, const std::string& path);

nlohmann::json polytope_to_json(const ConstraintPolytope& k);
ConstraintPolytope polytope_from_json(const nlohmann::json& j, int dim, const std::string& field);
double parse_probability(const nlohmann::json& v, const std::string& field);

nlohmann::json codebook_to_json(const Codebook& c);
Codebook codebook_from_json(const nlohmann::json& j);
Codebook load_codebook(const std::string& path);
void save_codebook(const Codebook& c, const std::string& path);

bool approx_equal(const ObliviousAVC& a, const ObliviousAVC& b, double tol = 1e-12);

}  // namespace avc
