// Symmetrization identity systems and LP decisions for the weak, cp and
// strong notions of list symmetrizability, with jamming-cost accounting.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avc/channel.hpp"
#include "avc/cpcone.hpp"
#include "avc/lp.hpp"

namespace avc {

// Raised when an LP-based decision needs a polytope state constraint.
class UnsupportedConstraint : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class SymMode { oblivious_unique, oblivious_list, omniscient, myopic };
const char* to_string(SymMode m);

// Homogeneous equalities over kernel entries U(s|ctx); variable ctx*|S| + s.
struct SymSystem {
  SymMode mode = SymMode::oblivious_list;
  int L = 1;
  int nu = 1;
  int nx = 0;
  int ns = 0;
  std::vector<int> context_shape;
  int num_contexts = 0;
  std::vector<LpRow> equations;
  long long raw_equations = 0;  // before dedup and trivial-row removal

  int num_vars() const { return num_contexts * ns; }
  double residual(const std::vector<double>& U) const;
};

// W_zx (myopic only) indexed [x] -> z.
SymSystem build_sym_system(const ObliviousAVC& avc, SymMode mode, int L = 1, int nu = 1,
                           const CondDist* W_zx = nullptr);

struct JammingKernel {
  SymMode mode = SymMode::oblivious_list;
  int L = 1;
  int nu = 1;  // 1: no time-sharing dependence
  CondDist U;  // rows: flattened context (u major), out: S

  std::vector<double> flat() const;
};

// Kernel rows [u][x_1..x_L] (or [x_1..x_L] when nu == 1).
double jamming_cost(const Dist& P_u, const CondDist& P_x_given_u, const JammingKernel& U,
                    std::span<const double> B_row);
std::vector<double> jamming_costs(const Dist& P_u, const CondDist& P_x_given_u, const JammingKernel& U,
                                  const ConstraintPolytope& lambda_s);
// Induced state law [P_u P_{x|u}^L U]_s.
std::vector<double> induced_state_law(const Dist& P_u, const CondDist& P_x_given_u, const JammingKernel& U);

enum class Answer { yes, no, yes_up_to_net, unknown };
const char* to_string(Answer a);

struct SymVerdict {
  std::string notion;
  int L = 1;
  Answer answer = Answer::unknown;
  std::optional<JammingKernel> witness;
  std::vector<double> costs;
  std::string certificate;
  std::optional<JointDist> coupling;          // J behind a strong NO
  std::optional<CpDecomposition> decomposition;  // decomposition behind a cp NO
  double infeasibility = 0;                   // phase-1 residual of the failing LP
  double resolution = 0;                      // net resolution behind YES-up-to-net
  double residual = 0;                        // witness residual in the SymSystem
  long long lp_count = 0;

  bool is_yes() const { return answer == Answer::yes || answer == Answer::yes_up_to_net; }
};

struct SymOptions {
  double net_resolution = 0.1;  // factor net for cp sweeps, lattice for self-couplings
  double weight_step = 0.1;     // mixture weights lattice
  int k_max = 0;                // 0: |X|
  double cp_net = 0.02;         // cp-cone membership net
  long long lp_budget = 20000;
  bool fast_path = true;
};

SymVerdict check_weak(const ObliviousAVC& avc, const Dist& P_x, int L, const SymOptions& opt = {});
SymVerdict check_cp(const ObliviousAVC& avc, const Dist& P_x, int L, const SymOptions& opt = {});
SymVerdict check_strong(const ObliviousAVC& avc, const Dist& P_x, int L, const SymOptions& opt = {});

// Whether one decomposition admits a per-u symmetrizing kernel within the
// cost bounds (yes) or not (no, exact).
SymVerdict check_decomposition(const ObliviousAVC& avc, const CpDecomposition& d, const SymOptions& opt = {});

// Decompositions (P_u, P_{x|u}) of P_x swept by check_cp, in sweep order.
std::vector<CpDecomposition> decomposition_net(const Dist& P_x, int L, const SymOptions& opt);
// Lattice points of the order-L self-couplings of P_x.
std::vector<JointDist> self_coupling_net(const Dist& P_x, int L, double resolution,
                                         long long budget = kDefaultBudget);

enum class Membership { member, member_up_to_net, non_member, unknown };
struct MembershipResult {
  Membership status = Membership::unknown;
  std::string reason;
  std::optional<CopositiveWitness> witness;
};
// P_s over S; known_cp marks a law already known to be cp over its marginal.
MembershipResult state_membership(const StateConstraint& c, const std::vector<double>& P_s, int nx,
                                  double cp_net = 0.02, bool known_cp = false);

struct ProfileEntry {
  Dist P_x;
  int strong = 0, cp = 0, weak = 0;
  std::vector<SymVerdict> verdicts;  // per L: weak, cp, strong
};

struct SymProfile {
  int L_max = 1;
  int strong = 0, cp = 0, weak = 0;
  int argmin_strong = 0, argmin_cp = 0, argmin_weak = 0;
  std::vector<ProfileEntry> entries;
};

// l1 projections of a simplex net onto lambda_x, deduplicated.
std::vector<Dist> lambda_x_candidates(const ObliviousAVC& avc, double eta);

SymProfile symmetrizability_profile(const ObliviousAVC& avc, const std::optional<Dist>& P_x, int L_max,
                                    const SymOptions& opt = {}, double lambda_x_net = 0.1);

}  // namespace avc
