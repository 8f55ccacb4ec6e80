// Capacity expressions: the inner minimization over state laws, the list
// capacity estimate C_L, the Sarwate-Gastpar bracket and fading capacity.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avc/channel.hpp"
#include "avc/cpcone.hpp"
#include "avc/symcheck.hpp"

namespace avc {

struct InnerOptions {
  int starts = 8;
  int max_iter = 4000;
  double tol = 1e-12;
  std::uint64_t seed = 1;
  // cp-union lambda_s: atoms R^L with R on this net inside P_set.
  double cp_atom_net = 0.05;
};

struct InnerResult {
  double value = 0;  // bits
  CondDist U;        // rows u, out s
  std::vector<double> P_s;
  int iterations = 0;
  // cp-union lambda_s is replaced by the hull of net atoms: value is an
  // upper estimate of the true minimum.
  bool inner_approximation = false;
};

// I(x;y|u) under P_u P_{x|u} U_{s|u} W.
double conditional_mi(const ObliviousAVC& avc, const Dist& P_u, const CondDist& P_x_given_u, const CondDist& U);

InnerResult inner_min(const ObliviousAVC& avc, const Dist& P_u, const CondDist& P_x_given_u,
                      const InnerOptions& opt = {});

struct SearchConfig {
  double lambda_x_net = 0.1;
  SymOptions sym;
  InnerOptions inner;
};

struct CapacityEstimate {
  double value = 0;
  bool all_symmetrizable = false;
  std::optional<CpDecomposition> argmax;
  long long admissible = 0;
  long long swept = 0;
  long long undecided = 0;
};

// max over admissible (non-L-symmetrizable) decompositions of inner_min.
CapacityEstimate capacity_lower_bound(const ObliviousAVC& avc, int L, const SearchConfig& cfg = {});

struct SgBounds {
  double upper = 0;  // over inputs that are not strongly L-symmetrizable
  double lower = 0;  // over inputs that are not weakly L-symmetrizable
  bool upper_all_symmetrizable = false;
  bool lower_all_symmetrizable = false;
  std::optional<Dist> upper_px, lower_px;
};
SgBounds sarwate_gastpar_bounds(const ObliviousAVC& avc, int L, const SearchConfig& cfg = {});

struct FadingCapacity {
  double value = 0;
  CondDist P_x_given_u;
  std::vector<double> per_u;
  int iterations = 0;
};
// Blahut-Arimoto on every block.
FadingCapacity fading_capacity(const FadingDMC& f, double tol = 1e-9, int max_iter = 200000);
// Capacity of a single DMC W[x] -> y.
double dmc_capacity(const CondDist& W, Dist* argmax = nullptr, double tol = 1e-9, int max_iter = 200000);

struct ChainCheck {
  double conditioned = 0;  // I(x;y|u,x_[L])
  double plain = 0;        // I(x;y|u)
  bool holds = false;
};
// Joint over u, x, x_1..x_L, y with x_i i.i.d. P_{x|u} independent of x given u.
ChainCheck chain_inequality_check(const ObliviousAVC& avc, const Dist& P_u, const CondDist& P_x_given_u,
                                  const JammingKernel& U);
// Axes u, x, x1..xL, y; throws ValidationError when x and x_[L] are not
// conditionally independent given u.
ChainCheck chain_inequality_check(const JointDist& P, int L, double tol = 1e-9);

}  // namespace avc
