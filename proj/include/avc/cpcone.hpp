// Completely positive joint laws: synthesis, distance to the cp set,
// copositive witnesses, symmetrization and the tuple double-counting sum.
#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "avc/channel.hpp"
#include "avc/probkit.hpp"

namespace avc {

// sum_i weights[i] * factors[i]^{(x) order}
struct CpDecomposition {
  Dist weights;
  std::vector<Dist> factors;
  int order = 2;

  int k() const { return weights.size(); }
  Dist marginal() const;
};

// Axis names x1..xL used for every order-L joint law in this module.
std::vector<std::string> tuple_axes(int L);
JointDist tensor_power(const Dist& p, int L);
JointDist cp_synthesize(const CpDecomposition& d);

// Sorted size-`size` multisets over [nx], lexicographic.
std::vector<std::vector<int>> sorted_multisets(int nx, int size);

// Marginal of axis i; all_marginals_equal compares every axis to axis 0.
Dist axis_marginal(const JointDist& J, int i);
bool all_marginals_equal(const JointDist& J, double tol = 1e-9);

double asymmetry(const JointDist& J);
JointDist symmetrize(const JointDist& J);

struct CpDistanceOptions {
  double net_resolution = 0.02;
  // l1 slack between the mixture marginal and P_x; negative means net_resolution.
  double marginal_slack = -1;
  // Atoms farther than this (l1) from P_x are dropped.
  double atom_radius = std::numeric_limits<double>::infinity();
  std::vector<Dist> extra_atoms;
};

struct CpDistance {
  double distance = 0;
  CpDecomposition nearest;
  int atoms = 0;
  double net_resolution = 0;
  double net_error = 0;  // order * net_resolution: distance of any cp law to the net hull
};

CpDistance distance_to_cp(const JointDist& J, const Dist& P_x, const CpDistanceOptions& opt = {});

// Symmetric Q over X^L, flat row-major.
struct CopositiveWitness {
  int nx = 0;
  int order = 0;
  std::vector<double> Q;
  double value = 0;   // <J, Q>
  double margin = 0;  // -value
  double net_resolution = 0;
  double net_min = 0;           // min over the verification net of <Q, R^L>
  double certified_lower = 0;   // lower bound on <Q, R^L> over the whole simplex
  bool exact = false;           // copositive by construction (square form)

  // <J,Q> below every value Q takes on the cp cone: J is not cp.
  bool certifies() const { return value < certified_lower - 1e-12; }
};

double copositive_form(const CopositiveWitness& w, const Dist& R);
double witness_inner(const CopositiveWitness& w, const JointDist& J);
// Minimum of <Q, R^L> over the simplex net of resolution eta.
double copositive_net_min(const CopositiveWitness& w, double eta);

// LP over symmetric Q with |Q| <= 1, <Q, R^L> >= 0 on the net, minimizing <J,Q>.
std::optional<CopositiveWitness> copositive_witness(const JointDist& J, const Dist& P_x,
                                                    double net_resolution = 0.02);
// Q = sym(v v^T (x) 1...1) with v the bottom eigenvector of the pairwise
// marginal; exactly copositive. None when that marginal is PSD or L < 2.
std::optional<CopositiveWitness> square_witness(const JointDist& J);

struct DoubleCounting {
  double lhs = 0;
  double rhs = 0;
};
DoubleCounting double_counting(const Codebook& code, const CopositiveWitness& w,
                               long long budget = kDefaultBudget);

struct CpExtraction {
  double fraction = 0;
  long long subsets = 0;
  long long close = 0;
  double turan_density_cap = 1;  // 1 - 1/C(K,L)
  double nu_floor = 0;           // 1/C(K,L)
};
CpExtraction cp_extraction_fraction(const Codebook& code, const Dist& P_hat, double eps, int L,
                                    int K = 0, const CpDistanceOptions& opt = {},
                                    long long budget = kDefaultBudget);

bool product_characterization_check(const Dist& P, const JointDist& Q, int L, double tol = 1e-9);

}  // namespace avc
