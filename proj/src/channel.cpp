#include "avc/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "avc/rng.hpp"

namespace avc {

using nlohmann::json;

StateConstraint StateConstraint::from_polytope(ConstraintPolytope k) {
  StateConstraint c;
  c.kind = Kind::polytope;
  c.polytope = std::move(k);
  return c;
}

StateConstraint StateConstraint::cp_union(ConstraintPolytope p_set, int order, double tol) {
  if (order < 1) throw ValidationError("lambda_s.L must be >= 1");
  StateConstraint c;
  c.kind = Kind::cp_union;
  c.p_set = std::move(p_set);
  c.order = order;
  c.tol = tol;
  return c;
}

void ObliviousAVC::validate() const {
  if (W.num_rows() != X.size * S.size || W.out_size() != Y.size)
    throw ValidationError("W: shape does not match alphabets");
  if (lambda_x.dim != X.size) throw ValidationError("lambda_x: dimension differs from |X|");
  if (lambda_s.is_polytope()) {
    if (lambda_s.polytope.dim != S.size) throw ValidationError("lambda_s: dimension differs from |S|");
  } else {
    if (lambda_s.p_set.dim != X.size) throw ValidationError("lambda_s.P_set: dimension differs from |X|");
    if (ipow(X.size, lambda_s.order) != S.size)
      throw ValidationError("lambda_s: cp-union needs |S| = |X|^L");
  }
}

ObliviousAVC make_avc(int nx, int ns, int ny, const std::vector<double>& w_yxs,
                      ConstraintPolytope lambda_x, StateConstraint lambda_s) {
  if (static_cast<int>(w_yxs.size()) != nx * ns * ny) throw ValidationError("W: wrong number of entries");
  std::vector<double> flat(static_cast<std::size_t>(nx) * ns * ny);
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      for (int s = 0; s < ns; ++s) flat[(x * ns + s) * ny + y] = w_yxs[(y * nx + x) * ns + s];
  ObliviousAVC a;
  a.X = Alphabet(nx);
  a.S = Alphabet(ns);
  a.Y = Alphabet(ny);
  a.W = CondDist({nx, ns}, ny, std::move(flat));
  a.lambda_x = std::move(lambda_x);
  a.lambda_s = std::move(lambda_s);
  a.validate();
  return a;
}

double Codebook::rate() const {
  if (n <= 0 || codewords.empty()) return 0;
  return std::log2(static_cast<double>(codewords.size())) / (n * std::log2(static_cast<double>(nx)));
}

void Codebook::validate() const {
  if (n < 1) throw ValidationError("codebook: n must be >= 1");
  if (nx < 1) throw ValidationError("codebook: alphabet must be >= 1");
  for (std::size_t i = 0; i < codewords.size(); ++i) {
    if (static_cast<int>(codewords[i].size()) != n)
      throw ValidationError("codebook: codeword " + std::to_string(i) + " has wrong length");
    for (int v : codewords[i])
      if (v < 0 || v >= nx)
        throw ValidationError("codebook: codeword " + std::to_string(i) + " has a symbol outside X");
  }
  if (!u_seq.empty()) {
    if (static_cast<int>(u_seq.size()) != n) throw ValidationError("codebook: u_seq has wrong length");
    for (int u : u_seq)
      if (u < 0 || u >= nu) throw ValidationError("codebook: u_seq symbol outside U");
  }
}

std::vector<int> apply_channel(const ObliviousAVC& avc, const std::vector<int>& x,
                               const std::vector<int>& s, std::uint64_t seed) {
  if (x.size() != s.size()) throw ValidationError("apply_channel: x and s lengths differ");
  Rng g(seed);
  std::vector<int> y(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t] < 0 || x[t] >= avc.nx() || s[t] < 0 || s[t] >= avc.ns())
      throw ValidationError("apply_channel: symbol out of range");
    y[t] = sample_index(g, avc.W.row(x[t] * avc.ns() + s[t]).pmf());
  }
  return y;
}

JointDist output_distribution(const ObliviousAVC& avc, const std::vector<int>& x,
                              const std::vector<int>& s, long long budget) {
  if (x.size() != s.size()) throw ValidationError("output_distribution: x and s lengths differ");
  const int n = static_cast<int>(x.size());
  long long total = 1;
  for (int t = 0; t < n; ++t) {
    total *= avc.ny();
    if (total > budget) throw BudgetExceeded("output_distribution: |Y|^n exceeds budget");
  }
  std::vector<Dist> f;
  std::vector<std::string> axes;
  for (int t = 0; t < n; ++t) {
    f.push_back(avc.W.row(x[t] * avc.ns() + s[t]));
    axes.push_back("y" + std::to_string(t));
  }
  return JointDist::product(f, axes);
}

FadingDMC induced_dmc(const ObliviousAVC& avc, const CondDist& U, const Dist& P_u) {
  if (U.out_size() != avc.ns()) throw ValidationError("induced_dmc: U output is not S");
  if (U.num_rows() != P_u.size()) throw ValidationError("induced_dmc: U rows differ from |U|");
  FadingDMC d;
  d.nx = avc.nx();
  d.ny = avc.ny();
  d.nu = P_u.size();
  d.P_u = P_u;
  std::vector<Dist> rows;
  for (int u = 0; u < d.nu; ++u)
    for (int x = 0; x < d.nx; ++x) {
      std::vector<double> r(d.ny, 0.0);
      for (int s = 0; s < avc.ns(); ++s)
        for (int y = 0; y < d.ny; ++y) r[y] += U(u, s) * avc.w(y, x, s);
      rows.emplace_back(r, 1e-7);
    }
  d.W = CondDist({d.nu, d.nx}, std::move(rows));
  return d;
}

ObliviousAVC bitflip_avc(double p) {
  std::vector<double> w(8);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x)
      for (int s = 0; s < 2; ++s) w[(y * 2 + x) * 2 + s] = ((x ^ s) == y) ? 1.0 : 0.0;
  ConstraintPolytope ks = p >= 1.0 ? ConstraintPolytope::unconstrained(2)
                                   : ConstraintPolytope(2, {{0.0, 1.0}}, {p});
  return make_avc(2, 2, 2, w, ConstraintPolytope::unconstrained(2), StateConstraint::from_polytope(ks));
}

double parse_probability(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash != std::string::npos) {
        double a = std::stod(s.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument(s);
        std::string rest = s.substr(slash + 1);
        double b = std::stod(rest, &used);
        if (used != rest.size() || b == 0) throw std::invalid_argument(s);
        return a / b;
      }
      double a = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return a;
    } catch (const std::exception&) {
      throw ValidationError(field + ": cannot parse '" + s + "' as a probability");
    }
  }
  throw ValidationError(field + ": expected a number or numeric string");
}

json polytope_to_json(const ConstraintPolytope& k) {
  json j;
  j["A"] = k.A;
  j["Gamma"] = k.gamma;
  return j;
}

ConstraintPolytope polytope_from_json(const json& j, int dim, const std::string& field) {
  if (j.is_null()) return ConstraintPolytope::unconstrained(dim);
  if (!j.is_object()) throw ValidationError(field + ": expected an object with A and Gamma");
  std::vector<std::vector<double>> a;
  std::vector<double> g;
  if (j.contains("A")) {
    if (!j["A"].is_array()) throw ValidationError(field + ".A: expected an array");
    for (std::size_t i = 0; i < j["A"].size(); ++i) {
      const auto& row = j["A"][i];
      const std::string rf = field + ".A[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        throw ValidationError(rf + ": expected " + std::to_string(dim) + " entries");
      std::vector<double> r;
      for (std::size_t c = 0; c < row.size(); ++c) r.push_back(parse_probability(row[c], rf));
      a.push_back(std::move(r));
    }
  }
  if (j.contains("Gamma")) {
    if (!j["Gamma"].is_array()) throw ValidationError(field + ".Gamma: expected an array");
    for (std::size_t i = 0; i < j["Gamma"].size(); ++i)
      g.push_back(parse_probability(j["Gamma"][i], field + ".Gamma[" + std::to_string(i) + "]"));
  }
  if (a.size() != g.size()) throw ValidationError(field + ": A and Gamma have different row counts");
  return ConstraintPolytope(dim, std::move(a), std::move(g));
}

namespace {

Alphabet alphabet_from_json(const json& j, const std::string& name) {
  const std::string f = "alphabets." + name;
  if (j.is_number_integer()) return Alphabet(j.get<int>());
  if (j.is_array()) return Alphabet(static_cast<int>(j.size()), j.get<std::vector<std::string>>());
  if (j.is_object() && j.contains("size")) {
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
    return Alphabet(j["size"].get<int>(), labels);
  }
  throw ValidationError(f + ": expected a size, a label list or {size, labels}");
}

json alphabet_to_json(const Alphabet& a) {
  if (a.labels.empty()) return a.size;
  return a.labels;
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  return j[key];
}

}  // namespace

json avc_to_json(const ObliviousAVC& avc) {
  json j;
  j["alphabets"] = {{"X", alphabet_to_json(avc.X)}, {"S", alphabet_to_json(avc.S)}, {"Y", alphabet_to_json(avc.Y)}};
  json w = json::array();
  for (int y = 0; y < avc.ny(); ++y) {
    json wy = json::array();
    for (int x = 0; x < avc.nx(); ++x) {
      json wx = json::array();
      for (int s = 0; s < avc.ns(); ++s) wx.push_back(avc.w(y, x, s));
      wy.push_back(wx);
    }
    w.push_back(wy);
  }
  j["W"] = w;
  j["lambda_x"] = polytope_to_json(avc.lambda_x);
  if (avc.lambda_s.is_polytope()) {
    j["lambda_s"] = polytope_to_json(avc.lambda_s.polytope);
    j["lambda_s"]["kind"] = "polytope";
  } else {
    j["lambda_s"] = {{"kind", "cp-union"},
                     {"P_set", polytope_to_json(avc.lambda_s.p_set)},
                     {"L", avc.lambda_s.order},
                     {"tol", avc.lambda_s.tol}};
  }
  return j;
}

ObliviousAVC avc_from_json(const json& j) {
  const json& al = need(j, "alphabets", "spec");
  Alphabet X = alphabet_from_json(need(al, "X", "alphabets"), "X");
  Alphabet S = alphabet_from_json(need(al, "S", "alphabets"), "S");
  Alphabet Y = alphabet_from_json(need(al, "Y", "alphabets"), "Y");
  const int nx = X.size, ns = S.size, ny = Y.size;

  const json& w = need(j, "W", "spec");
  if (!w.is_array() || static_cast<int>(w.size()) != ny)
    throw ValidationError("W: expected " + std::to_string(ny) + " entries indexed by y");
  std::vector<double> flat(static_cast<std::size_t>(nx) * ns * ny);
  for (int y = 0; y < ny; ++y) {
    if (!w[y].is_array() || static_cast<int>(w[y].size()) != nx)
      throw ValidationError("W[" + std::to_string(y) + "]: expected " + std::to_string(nx) + " entries indexed by x");
    for (int x = 0; x < nx; ++x) {
      const json& wx = w[y][x];
      if (!wx.is_array() || static_cast<int>(wx.size()) != ns)
        throw ValidationError("W[" + std::to_string(y) + "][" + std::to_string(x) + "]: expected " +
                              std::to_string(ns) + " entries indexed by s");
      for (int s = 0; s < ns; ++s) {
        std::string f = "W[" + std::to_string(y) + "][" + std::to_string(x) + "][" + std::to_string(s) + "]";
        double v = parse_probability(wx[s], f);
        if (!std::isfinite(v) || v < 0) throw ValidationError(f + ": negative or not finite");
        flat[(x * ns + s) * ny + y] = v;
      }
    }
  }
  for (int x = 0; x < nx; ++x)
    for (int s = 0; s < ns; ++s) {
      double sum = 0;
      for (int y = 0; y < ny; ++y) sum += flat[(x * ns + s) * ny + y];
      if (std::abs(sum - 1.0) > kNormTol) {
        std::ostringstream os;
        os.precision(12);
        os << "W: row (x=" << x << ", s=" << s << ") sums to " << sum << ", not 1";
        throw ValidationError(os.str());
      }
    }

  ObliviousAVC a;
  a.X = X;
  a.S = S;
  a.Y = Y;
  a.W = CondDist({nx, ns}, ny, std::move(flat));
  a.lambda_x = polytope_from_json(j.contains("lambda_x") ? j["lambda_x"] : json(), nx, "lambda_x");
  const json ls = j.contains("lambda_s") ? j["lambda_s"] : json();
  std::string kind = ls.is_object() && ls.contains("kind") ? ls["kind"].get<std::string>() : "polytope";
  if (kind == "polytope") {
    a.lambda_s = StateConstraint::from_polytope(polytope_from_json(ls, ns, "lambda_s"));
  } else if (kind == "cp-union" || kind == "cp_union") {
    int order = need(ls, "L", "lambda_s").get<int>();
    double tol = ls.contains("tol") ? parse_probability(ls["tol"], "lambda_s.tol") : 1e-6;
    a.lambda_s = StateConstraint::cp_union(polytope_from_json(need(ls, "P_set", "lambda_s"), nx, "lambda_s.P_set"),
                                           order, tol);
  } else {
    throw ValidationError("lambda_s.kind: unknown kind '" + kind + "'");
  }
  a.validate();
  return a;
}

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

ObliviousAVC load_spec(const std::string& path) {
  try {
    return avc_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_spec(const ObliviousAVC& avc, const std::string& path) { write_json(avc_to_json(avc), path); }

json codebook_to_json(const Codebook& c) {
  json j;
  j["n"] = c.n;
  j["alphabet"] = c.nx;
  j["codewords"] = c.codewords;
  if (!c.u_seq.empty()) {
    j["u_seq"] = c.u_seq;
    j["u_alphabet"] = c.nu;
  }
  return j;
}

Codebook codebook_from_json(const json& j) {
  Codebook c;
  try {
    c.n = need(j, "n", "codebook").get<int>();
    const json& al = need(j, "alphabet", "codebook");
    c.nx = al.is_array() ? static_cast<int>(al.size()) : al.get<int>();
    c.codewords = need(j, "codewords", "codebook").get<std::vector<std::vector<int>>>();
    if (j.contains("u_seq")) {
      c.u_seq = j["u_seq"].get<std::vector<int>>();
      int mx = 0;
      for (int u : c.u_seq) mx = std::max(mx, u);
      c.nu = j.contains("u_alphabet") ? j["u_alphabet"].get<int>() : mx + 1;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("codebook: ") + e.what());
  }
  c.validate();
  return c;
}

Codebook load_codebook(const std::string& path) { return codebook_from_json(read_json(path)); }

void save_codebook(const Codebook& c, const std::string& path) { write_json(codebook_to_json(c), path); }

bool approx_equal(const ObliviousAVC& a, const ObliviousAVC& b, double tol) {
  if (a.nx() != b.nx() || a.ns() != b.ns() || a.ny() != b.ny()) return false;
  for (int y = 0; y < a.ny(); ++y)
    for (int x = 0; x < a.nx(); ++x)
      for (int s = 0; s < a.ns(); ++s)
        if (std::abs(a.w(y, x, s) - b.w(y, x, s)) > tol) return false;
  auto same_poly = [&](const ConstraintPolytope& p, const ConstraintPolytope& q) {
    if (p.dim != q.dim || p.rows() != q.rows()) return false;
    for (int i = 0; i < p.rows(); ++i) {
      if (std::abs(p.gamma[i] - q.gamma[i]) > tol) return false;
      for (int k = 0; k < p.dim; ++k)
        if (std::abs(p.A[i][k] - q.A[i][k]) > tol) return false;
    }
    return true;
  };
  if (!same_poly(a.lambda_x, b.lambda_x)) return false;
  if (a.lambda_s.kind != b.lambda_s.kind) return false;
  if (a.lambda_s.is_polytope()) return same_poly(a.lambda_s.polytope, b.lambda_s.polytope);
  return a.lambda_s.order == b.lambda_s.order && std::abs(a.lambda_s.tol - b.lambda_s.tol) <= tol &&
         same_poly(a.lambda_s.p_set, b.lambda_s.p_set);
}

}  // namespace avc
