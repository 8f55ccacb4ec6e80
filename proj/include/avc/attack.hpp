// Jammers: the list-symmetrizing attack built from a code's joint-type
// spectrum, and i.i.d. state sequences drawn from U_{s|u}.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avc/channel.hpp"
#include "avc/cpcone.hpp"
#include "avc/symcheck.hpp"

namespace avc {

struct AttackConfig {
  double lambda = 0.05;  // composition net
  double eta = 0.05;     // spectrum cell net over Delta(X^L)
  double eps = 0.05;     // cp projection tolerance
  SymOptions sym;
  CpDistanceOptions cp;
  long long budget = kDefaultBudget;
};

// Everything the jammer fixes before seeing any randomness.
struct CpAttackPlan {
  int L = 1;
  std::vector<int> subcode;      // indices surviving composition reduction
  Dist P_hat_x;
  JointDist P_hat;               // densest spectrum cell point
  long long cell_count = 0;      // tuples in that cell
  long long tuples = 0;
  CpDecomposition decomposition; // of the projected cp law P_tilde
  JointDist P_tilde;
  double cp_distance = 0;
  JammingKernel kernel;          // rows [u][x_1..x_L]
  std::vector<double> plan_costs;   // cost_i(P_tilde, U)
  std::vector<double> margins;      // delta_i = Lambda_i - cost_i(P_tilde, U)
  std::vector<std::string> warnings;
};

struct AttackTranscript {
  std::vector<int> list;  // codeword indices, ascending
  std::vector<int> s_seq;
  std::vector<int> u_seq; // per-letter component of the decomposition (empty when |U| = 1)
  std::vector<double> costs;      // (1/n) sum_j B_i(s(j))
  std::vector<double> list_costs; // cost_i(tau_{x_L}, U): conditional mean given the list
  std::vector<bool> compliant;    // costs[i] <= Lambda_i + 1e-9
  bool good_event = false;        // l1(tau_{x_L}, P_tilde) <= eta + eps
  double list_distance = 0;
  bool all_compliant() const;
};

CpAttackPlan plan_cp_attack(const ObliviousAVC& avc, const Codebook& code, int L, const AttackConfig& cfg = {});
AttackTranscript run_cp_attack(const ObliviousAVC& avc, const Codebook& code, const CpAttackPlan& plan,
                               std::uint64_t seed, const AttackConfig& cfg = {});
AttackTranscript cp_symmetrization_attack(const ObliviousAVC& avc, const Codebook& code, int L,
                                          const AttackConfig& cfg, std::uint64_t seed);

// 1 - sum_i 4 (B_i*)^2 / (n delta_i^2), floored at 0.
double compliance_floor(const ConstraintPolytope& lambda_s, const std::vector<double>& margins, int n);

// s(j) ~ U(.|u(j)) independently.
std::vector<int> iid_state_attack(const CondDist& U, const std::vector<int>& u_seq, std::uint64_t seed);

// Message-independent law over state sequences, listed explicitly.
struct StateLaw {
  std::vector<std::vector<int>> seqs;
  std::vector<double> probs;
};
StateLaw point_state_law(const std::vector<int>& s);
// L codeword indices i.i.d. uniform; s(j) = flattened (x_{i_1}(j), ..., x_{i_L}(j)).
// The identity attack on order-L canonical channels.
StateLaw codeword_list_state_law(const Codebook& code, int L, long long budget = kDefaultBudget);

}  // namespace avc
