// avctool: command-line front end over the avc library.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <tbb/global_control.h>

#include "CLI11.hpp"
#include "avc/attack.hpp"
#include "avc/canonical.hpp"
#include "avc/capacity.hpp"
#include "avc/codegen.hpp"
#include "avc/decode.hpp"
#include "avc/report.hpp"
#include "avc/rng.hpp"

using namespace avc;
using nlohmann::json;

namespace {

std::vector<double> parse_pmf(const std::string& text, const std::string& field) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(parse_probability(json(tok), field));
  if (v.empty()) throw ValidationError(field + ": empty distribution");
  return v;
}

Dist parse_dist(const std::string& text, const std::string& field, int size) {
  auto v = parse_pmf(text, field);
  if (static_cast<int>(v.size()) != size)
    throw ValidationError(field + ": expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
  try {
    return Dist(v);
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
}

// Input law nearest to uniform among the projected lambda_x net points.
Dist default_px(const ObliviousAVC& avc, double grid) {
  auto cands = lambda_x_candidates(avc, grid);
  if (cands.empty()) throw ValidationError("lambda_x: no feasible input distribution");
  const std::vector<double> unif(avc.nx(), 1.0 / avc.nx());
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (l1_distance(cands[i].pmf(), unif) < l1_distance(cands[best].pmf(), unif) - 1e-12) best = i;
  return cands[best];
}

SymVerdict run_check(const std::string& mode, const ObliviousAVC& avc, const Dist& px, int L, const SymOptions& opt) {
  if (mode == "weak") return check_weak(avc, px, L, opt);
  if (mode == "cp") return check_cp(avc, px, L, opt);
  if (mode == "strong") return check_strong(avc, px, L, opt);
  throw ValidationError("--mode: expected weak, cp or strong");
}

ConstraintPolytope parse_pset(const std::string& text) {
  if (text == "demo") return demo_pset();
  std::ifstream in(text);
  if (!in) throw ValidationError("--Pset: expected 'demo', 'point:<pmf>' or a readable JSON file, got '" + text + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("--Pset: " + std::string(e.what()));
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw ValidationError("--Pset: field 'dim' missing or not an integer");
  return polytope_from_json(j, j["dim"].get<int>(), "Pset");
}

struct Globals {
  std::string format = "json";
  std::string report_path;
};

void emit(const Globals& g, const json& j) {
  const std::string text = render(j, g.format);
  if (g.report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(g.report_path);
    if (!out) throw ValidationError("--report: cannot write '" + g.report_path + "'");
    out << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::unique_ptr<tbb::global_control> threads;
  if (const char* t = std::getenv("AVC_THREADS")) {
    const int k = std::atoi(t);
    if (k > 0) threads = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, k);
  }
  spdlog::set_pattern("[%l] %v");
  spdlog::set_default_logger(spdlog::stderr_color_st("avctool"));

  CLI::App app{"avctool: symmetrizability, capacity and jamming experiments for oblivious AVCs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--report", g.report_path, "write the report here instead of stdout");

  // check-sym
  auto* cs = app.add_subcommand("check-sym", "decide L-symmetrizability of an input law");
  std::string cs_spec, cs_mode = "cp", cs_px;
  int cs_L = 1;
  double cs_net = 0.1;
  cs->add_option("spec", cs_spec, "channel spec")->required();
  cs->add_option("--mode", cs_mode, "weak | cp | strong")->check(CLI::IsMember({"weak", "cp", "strong"}));
  cs->add_option("--L", cs_L, "list size")->check(CLI::PositiveNumber);
  cs->add_option("--Px", cs_px, "input law, comma separated (default: lambda_x point nearest uniform)");
  cs->add_option("--net", cs_net, "net resolution")->check(CLI::Range(1e-3, 1.0));

  // profile
  auto* pr = app.add_subcommand("profile", "L*_strong, L*_cp, L*_weak up to Lmax");
  std::string pr_spec, pr_px;
  int pr_Lmax = 2;
  double pr_net = 0.1, pr_grid = 0.1;
  pr->add_option("spec", pr_spec, "channel spec")->required();
  pr->add_option("--Lmax", pr_Lmax, "largest list size")->check(CLI::PositiveNumber);
  pr->add_option("--Px", pr_px, "single input law (default: sweep lambda_x)");
  pr->add_option("--net", pr_net, "net resolution")->check(CLI::Range(1e-3, 1.0));
  pr->add_option("--grid", pr_grid, "lambda_x sweep resolution")->check(CLI::Range(1e-3, 1.0));

  // capacity
  auto* ca = app.add_subcommand("capacity", "list capacity lower bound estimate");
  std::string ca_spec;
  int ca_L = 1;
  double ca_grid = 0.1;
  bool ca_bounds = false;
  ca->add_option("spec", ca_spec, "channel spec")->required();
  ca->add_option("--L", ca_L, "list size")->check(CLI::PositiveNumber);
  ca->add_option("--grid", ca_grid, "input-law grid resolution")->check(CLI::Range(1e-3, 1.0));
  ca->add_flag("--bounds", ca_bounds, "also report the strong/weak bracket");

  // canonical
  auto* cn = app.add_subcommand("canonical", "build the order-L canonical channel over an input set");
  std::string cn_pset = "demo", cn_out;
  int cn_L = 1;
  cn->add_option("--Pset", cn_pset, "demo | point:<pmf> | polytope JSON file {dim, A, Gamma}");
  cn->add_option("--L", cn_L, "order")->check(CLI::PositiveNumber);
  cn->add_option("--out", cn_out, "write the channel spec here");

  // simulate
  auto* si = app.add_subcommand("simulate", "Monte Carlo error of a decoder under an attack");
  std::string si_spec, si_code, si_attack = "cp", si_decoder = "typicality", si_state;
  long long si_trials = 1000;
  std::uint64_t si_seed = 0;
  int si_L = 1, si_ml_samples = 64;
  double si_eta = 0.1, si_snet = 0.25;
  si->add_option("spec", si_spec, "channel spec")->required();
  si->add_option("codebook", si_code, "codebook")->required();
  si->add_option("--attack", si_attack, "none | iid | codeword | cp")
      ->check(CLI::IsMember({"none", "iid", "codeword", "cp"}));
  si->add_option("--decoder", si_decoder, "typicality | ml")->check(CLI::IsMember({"typicality", "ml"}));
  si->add_option("--trials", si_trials, "trials")->check(CLI::PositiveNumber);
  si->add_option("--seed", si_seed, "master seed")->required();
  si->add_option("--L", si_L, "list size")->check(CLI::PositiveNumber);
  si->add_option("--eta", si_eta, "typicality threshold")->check(CLI::PositiveNumber);
  si->add_option("--s-net", si_snet, "state conditional-type net")->check(CLI::Range(1e-3, 1.0));
  si->add_option("--state-pmf", si_state, "iid attack state law");
  si->add_option("--ml-samples", si_ml_samples, "attack draws forming the ML prior (iid, cp)")
      ->check(CLI::PositiveNumber);

  // extract-subcode
  auto* ex = app.add_subcommand("extract-subcode", "time-sharing constant-composition subcode");
  std::string ex_code, ex_out;
  double ex_zeta = 0.1, ex_lambda = 0.1, ex_floor = 0;
  ex->add_option("codebook", ex_code, "codebook")->required();
  ex->add_option("--zeta", ex_zeta, "chunk fraction")->check(CLI::Range(1e-6, 1.0));
  ex->add_option("--lambda", ex_lambda, "composition net")->check(CLI::Range(1e-6, 1.0));
  ex->add_option("--theta-floor", ex_floor, "required surviving fraction")->check(CLI::Range(0.0, 1.0));
  ex->add_option("--out", ex_out, "write the subcode here");

  // report
  auto* rp = app.add_subcommand("report", "re-emit a saved report");
  std::string rp_in;
  rp->add_option("input", rp_in, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cs) {
      auto avc = load_spec(cs_spec);
      SymOptions opt;
      opt.net_resolution = cs_net;
      const Dist px = cs_px.empty() ? default_px(avc, cs_net) : parse_dist(cs_px, "--Px", avc.nx());
      auto v = run_check(cs_mode, avc, px, cs_L, opt);
      emit(g, json{{"command", "check-sym"}, {"spec", cs_spec}, {"P_x", px.pmf()}, {"net", cs_net}, {"verdict", to_json(v)}});
    } else if (*pr) {
      auto avc = load_spec(pr_spec);
      SymOptions opt;
      opt.net_resolution = pr_net;
      std::optional<Dist> px;
      if (!pr_px.empty()) px = parse_dist(pr_px, "--Px", avc.nx());
      auto p = symmetrizability_profile(avc, px, pr_Lmax, opt, pr_grid);
      json rows = json::array();
      for (const auto& e : p.entries)
        rows.push_back(json{{"p1", e.P_x[avc.nx() - 1]}, {"strong", e.strong}, {"cp", e.cp}, {"weak", e.weak}});
      emit(g, json{{"command", "profile"}, {"spec", pr_spec}, {"profile", to_json(p)}, {"rows", rows}});
    } else if (*ca) {
      auto avc = load_spec(ca_spec);
      SearchConfig cfg;
      cfg.lambda_x_net = ca_grid;
      auto e = capacity_lower_bound(avc, ca_L, cfg);
      json j{{"command", "capacity"}, {"spec", ca_spec}, {"L", ca_L}, {"grid", ca_grid}, {"estimate", to_json(e)},
             {"value_4dp", fmt::format("{:.4f}", e.value)}};
      if (ca_bounds) j["bounds"] = to_json(sarwate_gastpar_bounds(avc, ca_L, cfg));
      emit(g, j);
    } else if (*cn) {
      ObliviousAVC avc;
      if (cn_pset.rfind("point:", 0) == 0) {
        auto v = parse_pmf(cn_pset.substr(6), "--Pset");
        avc = build_canonical_singleton(Dist(v), cn_L);
      } else {
        avc = build_canonical(parse_pset(cn_pset), cn_L);
      }
      json j{{"command", "canonical"}, {"Pset", cn_pset}, {"L", cn_L},
             {"X", avc.nx()}, {"S", avc.ns()}, {"Y", avc.ny()}};
      if (cn_out.empty()) {
        j["spec"] = avc_to_json(avc);
      } else {
        save_spec(avc, cn_out);
        j["out"] = cn_out;
      }
      emit(g, j);
    } else if (*si) {
      auto avc = load_spec(si_spec);
      auto code = load_codebook(si_code);
      if (code.nx != avc.nx()) throw ValidationError("codebook: alphabet size differs from the channel's |X|");
      const int n = code.n;
      json j{{"command", "simulate"}, {"spec", si_spec}, {"codebook", si_code}, {"seed", si_seed},
             {"trials", si_trials}, {"attack", si_attack}, {"decoder", si_decoder}, {"L", si_L}};
      StateSampler sampler;
      std::optional<StateLaw> exact_law;
      std::optional<CpAttackPlan> plan;
      CondDist iid_U;
      if (si_attack == "none") {
        exact_law = point_state_law(std::vector<int>(n, 0));
        sampler = [n](std::uint64_t) { return std::vector<int>(n, 0); };
      } else if (si_attack == "iid") {
        if (si_state.empty()) throw ValidationError("--state-pmf: required by the iid attack");
        iid_U = CondDist({1}, {parse_dist(si_state, "--state-pmf", avc.ns())});
        if (avc.lambda_s.is_polytope() && !polytope_contains(iid_U.row(0), avc.lambda_s.polytope))
          spdlog::warn("--state-pmf lies outside lambda_s");
        j["state_pmf"] = iid_U.row(0).pmf();
        sampler = [&iid_U, n](std::uint64_t s) { return iid_state_attack(iid_U, std::vector<int>(n, 0), s); };
      } else if (si_attack == "codeword") {
        if (avc.ns() != static_cast<int>(ipow(avc.nx(), si_L)))
          throw ValidationError("--attack codeword: needs |S| = |X|^L");
        exact_law = codeword_list_state_law(code, si_L);
        sampler = [&](std::uint64_t s) {
          Rng r(s);
          return exact_law->seqs[uniform_index(r, static_cast<int>(exact_law->seqs.size()))];
        };
      } else {
        plan = plan_cp_attack(avc, code, si_L);
        j["plan"] = to_json(*plan);
        sampler = [&](std::uint64_t s) { return run_cp_attack(avc, code, *plan, s).s_seq; };
      }
      StateLaw prior;
      if (exact_law) {
        prior = *exact_law;
      } else {
        for (int k = 0; k < si_ml_samples; ++k) {
          prior.seqs.push_back(sampler(mix_seed(si_seed ^ 0x5eedULL, k)));
          prior.probs.push_back(1.0 / si_ml_samples);
        }
      }
      ListDecoder dec;
      if (si_decoder == "ml") {
        dec = ml_list_decoder(avc, code, prior, si_L);
      } else {
        TypicalityConfig cfg;
        cfg.eta = si_eta;
        cfg.L = si_L;
        cfg.s_net = si_snet;
        dec = typicality_decoder(avc, code, cfg);
        j["eta"] = si_eta;
        j["s_net"] = si_snet;
      }
      auto mc = monte_carlo_error(avc, code, dec, sampler, si_trials, si_seed, si_L);
      j["error"] = to_json(mc);
      if (plan && avc.lambda_s.is_polytope()) {
        // Same per-trial state seeds as the Monte Carlo run.
        long long ok = 0;
        for (long long t = 0; t < si_trials; ++t)
          ok += run_cp_attack(avc, code, *plan, mix_seed(mix_seed(si_seed, t), 1)).all_compliant();
        j["compliance"] = json{{"fraction", static_cast<double>(ok) / si_trials},
                               {"floor", compliance_floor(avc.lambda_s.polytope, plan->margins, n)}};
      }
      emit(g, j);
    } else if (*ex) {
      auto code = load_codebook(ex_code);
      auto t = extract_timeshare_subcode(code, ex_zeta, ex_lambda, ex_floor);
      json j{{"command", "extract-subcode"}, {"codebook", ex_code}, {"zeta", ex_zeta}, {"lambda", ex_lambda},
             {"subcode", to_json(t)}};
      if (!ex_out.empty()) {
        save_codebook(t.subcode, ex_out);
        j["out"] = ex_out;
      }
      emit(g, j);
    } else if (*rp) {
      std::ifstream in(rp_in);
      if (!in) throw ValidationError("input: cannot read '" + rp_in + "'");
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ValidationError("input: " + std::string(e.what()));
      }
      emit(g, j);
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
