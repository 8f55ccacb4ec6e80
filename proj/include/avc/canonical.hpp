// Canonical channels whose symmetrizability set is a prescribed input set,
// and the separation demonstrations between the three notions.
#pragma once

#include <optional>
#include <vector>

#include "avc/channel.hpp"
#include "avc/symcheck.hpp"

namespace avc {

// S = X^L (x_1 most significant); y = the sorted multiset {x, s_1..s_L}.
ObliviousAVC build_canonical(const ConstraintPolytope& P_set, int L);
// lambda_x = {P_x}, lambda_s = {P_x^L} as polytopes.
ObliviousAVC build_canonical_singleton(const Dist& P_x, int L);

// Output index of a multiset given in any order.
int canonical_output_index(int nx, std::vector<int> symbols);
// Order L when avc has exactly the canonical structure for some L, else none.
std::optional<int> canonical_order(const ObliviousAVC& avc);

// U(s|x_[L]) = 1[s = x_[L]] on the order-L canonical channel.
JammingKernel identity_kernel(int nx, int L);
// U(s|x_[Lq]) = 1[s_[Lq] = x_[Lq]] prod_{k>Lq} P(s_k) for Lq <= L.
JammingKernel padded_identity_kernel(const Dist& P, int Lq, int L);

// reorderings: every solution sends x_[L] to some reordering of x_[L], the
// identity included; the state law is then fixed only up to orbit sums.
enum class SingletonKind { singleton_identity, singleton_other, reorderings, empty, other };
const char* to_string(SingletonKind k);

struct SingletonResult {
  SingletonKind kind = SingletonKind::other;
  std::optional<JammingKernel> witness;
  long long lp_count = 0;
  int equations = 0;
};
SingletonResult verify_sym_singleton(const ObliviousAVC& avc, int L);

struct SeparationReport {
  SymProfile main;       // lambda_x = P_set
  SymProfile singleton;  // singleton-P variant
  Dist singleton_px;
  SingletonResult at_L, at_L_plus_1;
  bool strong_below = false;   // L*_strong < L*_cp = L*_weak = L
  bool cp_below = false;       // singleton: L*_cp < L*_weak = L
};
SeparationReport separation_demo(const ConstraintPolytope& P_set, int L, const SymOptions& opt = {},
                                 std::optional<Dist> singleton_px = std::nullopt);

// The demo input set {P : P(last) <= 0.3} over a binary alphabet.
ConstraintPolytope demo_pset();

}  // namespace avc
