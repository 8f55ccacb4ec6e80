#include "avc/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>
#include <tbb/parallel_for.h>

#include "avc/rng.hpp"

namespace avc {

namespace {

// out += weight * prod_j W(y_j | x_j, s_j) over all y^n (y_0 most significant).
void add_product(const ObliviousAVC& avc, const std::vector<int>& x, const std::vector<int>& s, double weight,
                 std::vector<double>& out, std::vector<double>& a, std::vector<double>& b) {
  const int ny = avc.ny();
  a.assign(1, weight);
  for (std::size_t j = 0; j < x.size(); ++j) {
    b.assign(a.size() * ny, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] == 0) continue;
      for (int y = 0; y < ny; ++y) b[k * ny + y] = a[k] * avc.w(y, x[j], s[j]);
    }
    std::swap(a, b);
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += a[k];
}

long long output_space(const ObliviousAVC& avc, int n, long long budget) {
  if (n * std::log2(static_cast<double>(avc.ny())) > std::log2(static_cast<double>(budget)))
    throw BudgetExceeded("exact enumeration: |Y|^n exceeds the budget");
  return ipow(avc.ny(), n);
}

std::vector<std::vector<double>> message_output_laws(const ObliviousAVC& avc, const Codebook& code,
                                                     const StateLaw& law, long long budget) {
  const long long ny_n = output_space(avc, code.n, budget);
  if (static_cast<double>(ny_n) * code.size() > 8.0 * budget)
    throw BudgetExceeded("exact enumeration: M |Y|^n exceeds the budget");
  if (law.seqs.size() != law.probs.size() || law.seqs.empty()) throw ValidationError("state law is empty or malformed");
  std::vector<std::vector<double>> P(code.size(), std::vector<double>(ny_n, 0.0));
  std::vector<double> a, b;
  for (int i = 0; i < code.size(); ++i)
    for (std::size_t k = 0; k < law.seqs.size(); ++k) {
      if (static_cast<int>(law.seqs[k].size()) != code.n) throw ValidationError("state sequence length differs from n");
      if (law.probs[k] > 0) add_product(avc, code.codewords[i], law.seqs[k], law.probs[k], P[i], a, b);
    }
  return P;
}

std::vector<int> top_l(const std::vector<double>& score, int L) {
  std::vector<int> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  const int k = std::min<int>(L, static_cast<int>(idx.size()));
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    return score[a] != score[b] ? score[a] > score[b] : a < b;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

McError summarize(const std::vector<char>& err, const std::vector<char>& over) {
  McError r;
  r.trials = static_cast<long long>(err.size());
  for (std::size_t t = 0; t < err.size(); ++t) {
    r.errors += err[t];
    r.overflows += over[t];
  }
  r.mean = r.trials ? static_cast<double>(r.errors) / r.trials : 0;
  const double h = r.trials ? 1.96 * std::sqrt(r.mean * (1 - r.mean) / r.trials) : 0;
  r.lo = std::max(0.0, r.mean - h);
  r.hi = std::min(1.0, r.mean + h);
  return r;
}

// Joint (u,x,x1..xL,s,y) from sequence counts and V(s|u,x,y); returns I(x,y; x_[L] | u,s).
double tournament_mi(const ObliviousAVC& avc, const std::vector<int>& us, int nu, const std::vector<int>& x,
                     const std::vector<const std::vector<int>*>& list, const std::vector<int>& y,
                     const std::vector<double>& V) {
  const int nx = avc.nx(), ns = avc.ns(), ny = avc.ny(), L = static_cast<int>(list.size());
  std::vector<int> shape = {nu, nx};
  std::vector<std::string> axes = {"u", "x"}, xs;
  for (int k = 1; k <= L; ++k) {
    shape.push_back(nx);
    axes.push_back("x" + std::to_string(k));
    xs.push_back(axes.back());
  }
  shape.push_back(ns);
  axes.push_back("s");
  shape.push_back(ny);
  axes.push_back("y");
  const long long per_l = ipow(nx, L);
  std::vector<double> p(static_cast<std::size_t>(nu) * nx * per_l * ns * ny, 0.0);
  const double w = 1.0 / static_cast<double>(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    long long c = 0;
    for (const auto* l : list) c = c * nx + (*l)[j];
    const long long ctx = (static_cast<long long>(us[j]) * nx + x[j]) * ny + y[j];
    for (int s = 0; s < ns; ++s) {
      const double v = V[ctx * ns + s];
      if (v == 0) continue;
      p[((((static_cast<std::size_t>(us[j]) * nx + x[j]) * per_l + c) * ns + s) * ny) + y[j]] += w * v;
    }
  }
  JointDist J(shape, axes, std::move(p), 1e-6);
  return mutual_info(J, std::vector<std::string>{"x", "y"}, xs, {"u", "s"});
}

}  // namespace

TypicalityResult typicality_list_decode(const ObliviousAVC& avc, const Codebook& code, const std::vector<int>& y,
                                        const TypicalityConfig& cfg) {
  const int n = code.n, nx = avc.nx(), ns = avc.ns(), ny = avc.ny(), M = code.size();
  if (static_cast<int>(y.size()) != n) throw ValidationError("typicality decoder: y length differs from n");
  if (code.nx != nx) throw ValidationError("typicality decoder: code alphabet differs from |X|");
  const int nu = code.u_seq.empty() ? 1 : code.nu;
  const std::vector<int> us = code.u_seq.empty() ? std::vector<int>(n, 0) : code.u_seq;
  const int C = nu * nx * ny;
  const auto net = simplex_net(ns, cfg.s_net);
  TypicalityResult res;

  // Step 1: for each message, every net kernel V(s|u,x,y) passing the divergence test.
  std::vector<std::vector<std::pair<double, std::vector<double>>>> witnesses(M);
  for (int i = 0; i < M; ++i) {
    const auto& x = code.codewords[i];
    std::vector<double> t(C, 0.0), tux(nu * nx, 0.0);
    for (int j = 0; j < n; ++j) {
      t[(us[j] * nx + x[j]) * ny + y[j]] += 1.0 / n;
      tux[us[j] * nx + x[j]] += 1.0 / n;
    }
    std::vector<int> ctx;
    for (int c = 0; c < C; ++c)
      if (t[c] > 0) ctx.push_back(c);
    const double combos = std::pow(static_cast<double>(net.size()), ctx.size());
    if (res.evaluated + combos > cfg.budget) throw BudgetExceeded("typicality decoder: s-type net exceeds the budget");
    std::vector<int> pick(ctx.size(), 0);
    std::vector<double> V(static_cast<std::size_t>(C) * ns, 0.0), Ps(ns);
    while (true) {
      ++res.evaluated;
      std::fill(Ps.begin(), Ps.end(), 0.0);
      for (std::size_t k = 0; k < ctx.size(); ++k)
        for (int s = 0; s < ns; ++s) {
          V[ctx[k] * ns + s] = net[pick[k]][s];
          Ps[s] += t[ctx[k]] * net[pick[k]][s];
        }
      bool feasible;
      if (avc.lambda_s.is_polytope()) {
        feasible = polytope_contains(Ps, avc.lambda_s.polytope, 1e-9);
      } else {
        auto m = state_membership(avc.lambda_s, Ps, nx);
        feasible = m.status == Membership::member || m.status == Membership::member_up_to_net;
      }
      if (feasible) {
        double D = 0;
        for (int c : ctx) {
          const int yv = c % ny, xv = (c / ny) % nx, uv = c / (ny * nx);
          for (int s = 0; s < ns; ++s) {
            const double p = t[c] * V[c * ns + s];
            if (p <= 0) continue;
            const double q = tux[uv * nx + xv] * Ps[s] * avc.w(yv, xv, s);
            if (q <= 0) {
              D = std::numeric_limits<double>::infinity();
              break;
            }
            D += p * std::log2(p / q);
          }
          if (!std::isfinite(D)) break;
        }
        if (D <= cfg.eta) witnesses[i].emplace_back(D, V);
      }
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == static_cast<int>(net.size())) pick[k++] = 0;
      if (k == pick.size()) break;
    }
    if (!witnesses[i].empty()) {
      res.step1.push_back(i);
      std::stable_sort(witnesses[i].begin(), witnesses[i].end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  }

  // Step 2: the message wins if one witness keeps every other L-list of survivors uninformative.
  for (int i : res.step1) {
    std::vector<int> others;
    for (int k : res.step1)
      if (k != i) others.push_back(k);
    const int L = cfg.L;
    if (static_cast<int>(others.size()) < L) {
      res.list.push_back(i);
      continue;
    }
    bool accepted = false;
    for (const auto& [D, V] : witnesses[i]) {
      bool ok = true;
      std::vector<int> idx(L);
      std::iota(idx.begin(), idx.end(), 0);
      const int m = static_cast<int>(others.size());
      while (ok) {
        std::vector<const std::vector<int>*> list;
        for (int k : idx) list.push_back(&code.codewords[others[k]]);
        if (tournament_mi(avc, us, nu, code.codewords[i], list, y, V) > cfg.eta) ok = false;
        int k = L - 1;
        while (k >= 0 && idx[k] == m - L + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int t = k + 1; t < L; ++t) idx[t] = idx[t - 1] + 1;
      }
      if (ok) {
        accepted = true;
        break;
      }
    }
    if (accepted) res.list.push_back(i);
  }
  if (static_cast<int>(res.list.size()) > cfg.L) {
    res.overflow = true;
    std::string ys, ls;
    for (int v : y) ys += std::to_string(v);
    for (int v : res.list) ls += std::to_string(v) + " ";
    spdlog::warn("typicality decoder returned {} > L = {} messages for y = {}: {}", res.list.size(), cfg.L, ys, ls);
  }
  return res;
}

ListDecoder typicality_decoder(const ObliviousAVC& avc, const Codebook& code, const TypicalityConfig& cfg) {
  return [&avc, &code, cfg](const std::vector<int>& y) { return typicality_list_decode(avc, code, y, cfg).list; };
}

ListDecoder ml_list_decoder(const ObliviousAVC& avc, const Codebook& code, const StateLaw& law, int L) {
  return [&avc, &code, law, L](const std::vector<int>& y) {
    std::vector<double> score(code.size(), 0.0);
    for (int i = 0; i < code.size(); ++i)
      for (std::size_t k = 0; k < law.seqs.size(); ++k) {
        double p = law.probs[k];
        for (int j = 0; j < code.n && p > 0; ++j) p *= avc.w(y[j], code.codewords[i][j], law.seqs[k][j]);
        score[i] += p;
      }
    return top_l(score, L);
  };
}

ListDecoder ml_fading_decoder(const FadingDMC& f, const Codebook& code, int L) {
  return [&f, &code, L](const std::vector<int>& y) {
    std::vector<double> score(code.size(), 0.0);
    for (int i = 0; i < code.size(); ++i) {
      double lp = 0;
      for (int j = 0; j < code.n; ++j) {
        const int u = code.u_seq.empty() ? 0 : code.u_seq[j];
        const double w = f.w(y[j], code.codewords[i][j], u);
        if (w <= 0) {
          lp = -std::numeric_limits<double>::infinity();
          break;
        }
        lp += std::log(w);
      }
      score[i] = lp;
    }
    return top_l(score, L);
  };
}

double bayes_list_error(const ObliviousAVC& avc, const Codebook& code, const StateLaw& law, int L, long long budget) {
  code.validate();
  if (L < 1) throw ValidationError("bayes_list_error: L must be >= 1");
  const int M = code.size();
  if (M <= L) return 0;
  auto P = message_output_laws(avc, code, law, budget);
  double hit = 0;
  std::vector<double> col(M);
  for (std::size_t y = 0; y < P[0].size(); ++y) {
    for (int i = 0; i < M; ++i) col[i] = P[i][y];
    std::nth_element(col.begin(), col.begin() + L - 1, col.end(), std::greater<>());
    for (int k = 0; k < L; ++k) hit += col[k];
  }
  return std::max(0.0, 1 - hit / M);
}

double exact_avg_error(const ObliviousAVC& avc, const Codebook& code, const ListDecoder& dec, const StateLaw& law,
                       long long budget) {
  code.validate();
  auto P = message_output_laws(avc, code, law, budget);
  const int M = code.size(), n = code.n;
  const std::vector<int> shape(n, avc.ny());
  std::vector<int> y;
  double miss = 0;
  for (std::size_t yi = 0; yi < P[0].size(); ++yi) {
    double mass = 0;
    for (int i = 0; i < M; ++i) mass += P[i][yi];
    if (mass == 0) continue;
    unflatten(static_cast<long long>(yi), shape, y);
    auto list = dec(y);
    for (int i = 0; i < M; ++i)
      if (std::find(list.begin(), list.end(), i) == list.end()) miss += P[i][yi];
  }
  return miss / M;
}

double exact_avg_error(const ObliviousAVC& avc, const Codebook& code, const ListDecoder& dec,
                       const std::vector<int>& s_seq, long long budget) {
  return exact_avg_error(avc, code, dec, point_state_law(s_seq), budget);
}

McError monte_carlo_error(const ObliviousAVC& avc, const Codebook& code, const ListDecoder& dec,
                          const StateSampler& attack, long long trials, std::uint64_t seed, int L) {
  code.validate();
  if (trials < 1) throw ValidationError("monte_carlo_error: trials must be >= 1");
  std::vector<char> err(trials, 0), over(trials, 0);
  tbb::parallel_for(0LL, trials, [&](long long t) {
    const std::uint64_t ts = mix_seed(seed, static_cast<std::uint64_t>(t));
    Rng g(ts);
    const int i = uniform_index(g, code.size());
    auto s = attack(mix_seed(ts, 1));
    auto y = apply_channel(avc, code.codewords[i], s, mix_seed(ts, 2));
    auto list = dec(y);
    err[t] = std::find(list.begin(), list.end(), i) == list.end();
    over[t] = static_cast<int>(list.size()) > L;
  });
  return summarize(err, over);
}

McError monte_carlo_fading_error(const FadingDMC& f, const Codebook& code, const ListDecoder& dec, long long trials,
                                 std::uint64_t seed, int L) {
  code.validate();
  if (trials < 1) throw ValidationError("monte_carlo_fading_error: trials must be >= 1");
  std::vector<char> err(trials, 0), over(trials, 0);
  tbb::parallel_for(0LL, trials, [&](long long t) {
    Rng g(mix_seed(seed, static_cast<std::uint64_t>(t)));
    const int i = uniform_index(g, code.size());
    std::vector<int> y(code.n);
    for (int j = 0; j < code.n; ++j) {
      const int u = code.u_seq.empty() ? 0 : code.u_seq[j];
      y[j] = sample_index(g, f.W.row(u * f.nx + code.codewords[i][j]).pmf());
    }
    auto list = dec(y);
    err[t] = std::find(list.begin(), list.end(), i) == list.end();
    over[t] = static_cast<int>(list.size()) > L;
  });
  return summarize(err, over);
}

}  // namespace avc
