// List decoders and error probabilities: the two-step typicality decoder,
// maximum-likelihood lists, the exact optimal list error and averaged error.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "avc/attack.hpp"
#include "avc/channel.hpp"

namespace avc {

using ListDecoder = std::function<std::vector<int>(const std::vector<int>& y)>;
using StateSampler = std::function<std::vector<int>(std::uint64_t seed)>;

struct TypicalityConfig {
  double eta = 0.1;
  int L = 1;
  double s_net = 0.25;      // resolution of the conditional-type net for s given (u,x,y)
  long long budget = 2'000'000;
};

struct TypicalityResult {
  std::vector<int> list;
  std::vector<int> step1;       // messages passing the divergence test
  bool overflow = false;        // |list| > L: logged as a counterexample
  long long evaluated = 0;      // net points examined
};

// Reference law in the divergence test is tau_{u,x_i} P_s W.
TypicalityResult typicality_list_decode(const ObliviousAVC& avc, const Codebook& code, const std::vector<int>& y,
                                        const TypicalityConfig& cfg);
ListDecoder typicality_decoder(const ObliviousAVC& avc, const Codebook& code, const TypicalityConfig& cfg);

// L most likely messages under y ~ prod W(y|x, s) averaged over the state law
// (ties: lowest index).
ListDecoder ml_list_decoder(const ObliviousAVC& avc, const Codebook& code, const StateLaw& law, int L);
// L most likely messages for a fading DMC along the code's u_seq.
ListDecoder ml_fading_decoder(const FadingDMC& f, const Codebook& code, int L);

// 1 - (1/M) sum_y (sum of the L largest P(y|i)); |Y|^n bounded by the budget.
double bayes_list_error(const ObliviousAVC& avc, const Codebook& code, const StateLaw& law, int L,
                        long long budget = kDefaultBudget);

// (1/M) sum_i sum_y P(y|i) [i not in psi(y)], averaged over the state law.
double exact_avg_error(const ObliviousAVC& avc, const Codebook& code, const ListDecoder& dec, const StateLaw& law,
                       long long budget = kDefaultBudget);
double exact_avg_error(const ObliviousAVC& avc, const Codebook& code, const ListDecoder& dec,
                       const std::vector<int>& s_seq, long long budget = kDefaultBudget);

struct McError {
  double mean = 0;
  double lo = 0, hi = 0;  // 95% normal interval, clipped to [0,1]
  long long trials = 0;
  long long errors = 0;
  long long overflows = 0;  // decoder lists longer than L
};
// Uniform message, state from the sampler (oblivious to the message), channel
// noise; trial t uses seed mix_seed(seed, t). Parallel over trials.
McError monte_carlo_error(const ObliviousAVC& avc, const Codebook& code, const ListDecoder& dec,
                          const StateSampler& attack, long long trials, std::uint64_t seed, int L = 1);
McError monte_carlo_fading_error(const FadingDMC& f, const Codebook& code, const ListDecoder& dec, long long trials,
                                 std::uint64_t seed, int L = 1);

}  // namespace avc
