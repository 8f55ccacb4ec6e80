// Codebooks: chunk-wise constant-composition sampling, composition
// reduction, joint-type spectra, codeword property checks and column
// time-sharing extraction.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avc/channel.hpp"
#include "avc/probkit.hpp"

namespace avc {

// Per-chunk symbol counts: largest-remainder apportionment of |chunk| * P_{x|u}.
std::vector<std::vector<long long>> chunk_compositions(const std::vector<int>& u_seq, int nu,
                                                      const CondDist& P_x_given_u);

// Empty u_seq means |U| = 1. Codewords are i.i.d. uniform over each chunk's type class.
Codebook sample_codebook(int n, int M, const std::vector<int>& u_seq, const CondDist& P_x_given_u,
                         std::uint64_t seed);

// Type of x restricted to `positions` (all positions when empty).
Dist composition(const std::vector<int>& x, int nx, const std::vector<int>& positions = {});

struct CcReduction {
  Codebook subcode;
  std::vector<int> kept;  // indices into the input code
  Dist P_hat;
  long long cells = 0;    // occupied net cells
  double size_floor = 0;  // |code| / (|X|/(2 lambda) + 1)^|X|
};
// Survivors share the nearest point P_hat of a lambda-covering simplex net
// (largest cell, lowest net index on ties); positions restricts the type.
CcReduction cc_reduce(const Codebook& code, double lambda, const std::vector<int>& positions = {});
double cc_size_factor(int nx, double lambda);

// One entry per ascending index tuple, axes x1..xL.
std::vector<JointDist> joint_type_spectrum(const Codebook& code, int L, long long budget = kDefaultBudget);

struct PropertyViolation {
  std::vector<long long> counts;  // offending joint type (flattened counts)
  double observed = 0;
  double bound = 0;
};

struct PropertyCheck {
  std::string name;
  bool applicable = true;
  bool conditional = false;  // 2' and 3': checked only where R < I(x_k;s|u) for all k
  bool pass = true;
  long long types_checked = 0;
  std::vector<PropertyViolation> violations;
};

struct CwPropertyReport {
  double rate = 0;  // (1/n) log2(M/L)
  bool applicable = true;
  std::string note;
  std::vector<PropertyCheck> properties;  // 1, 2, 3, 2', 3'

  bool all_pass() const;
  const PropertyCheck& get(const std::string& name) const;
};
// Probe sequences x for properties 3 and 3' are the codewords themselves.
CwPropertyReport verify_cw_properties(const Codebook& code, const std::vector<int>& u_seq, int nu,
                                      const std::vector<int>& s_seq, int ns, double eps, int L,
                                      long long budget = kDefaultBudget);

struct TimeshareSubcode {
  Codebook subcode;  // carries u_seq
  std::vector<int> kept;
  std::vector<int> u_seq;
  int nu = 0;
  std::vector<Dist> column_cells;       // net point of each u
  std::vector<Dist> chunk_compositions; // P'_{x_u} of the survivors
  double theta = 0;                     // |subcode| / |code|
  double theta_bound = 0;               // (|X|/(2 lambda')+1)^(-|X| |U|)
  bool meets_floor = false;             // theta >= max(theta_floor, theta_bound)
};
TimeshareSubcode extract_timeshare_subcode(const Codebook& code, double zeta, double lambda_p,
                                           double theta_floor = 0);

struct ListFact {
  long long generated = 0;  // |family of L-subsets of members|
  long long family = 0;     // |family of (L+1)-lists|
  bool holds = false;       // generated * (M - L) >= family
};
ListFact list_generation_fact(int M, int L, const std::vector<std::vector<int>>& lists);

}  // namespace avc
