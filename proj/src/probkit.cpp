#include "avc/probkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace avc {

namespace {

void check_pmf(const std::vector<double>& p, double tol, const char* what) {
  if (p.empty()) throw ValidationError(std::string(what) + ": empty pmf");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < -tol) {
      std::ostringstream os;
      os << what << ": entry " << i << " is negative or not finite (" << p[i] << ")";
      throw ValidationError(os.str());
    }
    s += p[i];
  }
  if (std::abs(s - 1.0) > tol) {
    std::ostringstream os;
    os << what << ": masses sum to " << s << ", not 1";
    throw ValidationError(os.str());
  }
}

double plogp(double p) { return p > kZeroTol ? p * std::log2(p) : 0.0; }

}  // namespace

Alphabet::Alphabet(int n, std::vector<std::string> names) : size(n), labels(std::move(names)) {
  if (n < 1) throw ValidationError("alphabet size must be >= 1");
  if (!labels.empty()) {
    if (static_cast<int>(labels.size()) != n)
      throw ValidationError("alphabet labels: count differs from size");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (static_cast<int>(seen.size()) != n)
      throw ValidationError("alphabet labels must be distinct");
  }
}

std::string Alphabet::label(int i) const {
  return labels.empty() ? std::to_string(i) : labels.at(i);
}

Dist::Dist(std::vector<double> pmf, double tol) : p_(std::move(pmf)) {
  check_pmf(p_, tol, "Dist");
  for (double& v : p_)
    if (v < 0) v = 0;
}

Dist Dist::uniform(int k) { return Dist(std::vector<double>(k, 1.0 / k)); }

Dist Dist::point(int k, int i) {
  std::vector<double> p(k, 0.0);
  p.at(i) = 1.0;
  return Dist(std::move(p));
}

std::vector<long long> strides_of(const std::vector<int>& shape) {
  std::vector<long long> st(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) st[i] = st[i + 1] * shape[i + 1];
  return st;
}

void unflatten(long long flat, const std::vector<int>& shape, std::vector<int>& out) {
  out.resize(shape.size());
  for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
    out[i] = static_cast<int>(flat % shape[i]);
    flat /= shape[i];
  }
}

long long flatten(std::span<const int> idx, const std::vector<int>& shape) {
  long long f = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) f = f * shape[i] + idx[i];
  return f;
}

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

JointDist::JointDist(std::vector<int> shape, std::vector<std::string> axes,
                     std::vector<double> pmf, double tol)
    : shape_(std::move(shape)), axes_(std::move(axes)), p_(std::move(pmf)) {
  if (shape_.size() != axes_.size()) throw ValidationError("JointDist: shape/axes length mismatch");
  std::set<std::string> seen(axes_.begin(), axes_.end());
  if (seen.size() != axes_.size()) throw ValidationError("JointDist: duplicate axis names");
  long long n = 1;
  for (int s : shape_) {
    if (s < 1) throw ValidationError("JointDist: axis size must be >= 1");
    n *= s;
  }
  if (static_cast<long long>(p_.size()) != n) throw ValidationError("JointDist: pmf size does not match shape");
  check_pmf(p_, tol, "JointDist");
  for (double& v : p_)
    if (v < 0) v = 0;
}

JointDist JointDist::from_dist(const Dist& p, const std::string& axis) {
  return JointDist({p.size()}, {axis}, p.pmf());
}

JointDist JointDist::product(const std::vector<Dist>& factors, const std::vector<std::string>& axes) {
  std::vector<int> shape;
  for (const auto& f : factors) shape.push_back(f.size());
  std::vector<double> p(1, 1.0);
  for (const auto& f : factors) {
    std::vector<double> q;
    q.reserve(p.size() * f.size());
    for (double a : p)
      for (double b : f.pmf()) q.push_back(a * b);
    p.swap(q);
  }
  return JointDist(shape, axes, std::move(p));
}

int JointDist::axis(const std::string& name) const {
  for (int i = 0; i < rank(); ++i)
    if (axes_[i] == name) return i;
  throw ValidationError("JointDist: missing axis '" + name + "'");
}

bool JointDist::has_axis(const std::string& name) const {
  return std::find(axes_.begin(), axes_.end(), name) != axes_.end();
}

double JointDist::at(std::span<const int> idx) const { return p_[flatten(idx, shape_)]; }

JointDist JointDist::marginal(const std::vector<std::string>& keep) const {
  std::vector<int> pos;
  std::vector<int> shape;
  for (const auto& k : keep) {
    pos.push_back(axis(k));
    shape.push_back(shape_[pos.back()]);
  }
  long long out_n = 1;
  for (int s : shape) out_n *= s;
  std::vector<double> out(out_n, 0.0);
  std::vector<int> idx, sub(pos.size());
  for (std::size_t f = 0; f < p_.size(); ++f) {
    if (p_[f] == 0) continue;
    unflatten(static_cast<long long>(f), shape_, idx);
    for (std::size_t j = 0; j < pos.size(); ++j) sub[j] = idx[pos[j]];
    out[flatten(sub, shape)] += p_[f];
  }
  return JointDist(shape, keep, std::move(out));
}

Dist JointDist::to_dist() const {
  if (rank() != 1) throw ValidationError("JointDist::to_dist requires rank 1");
  return Dist(p_);
}

CondDist::CondDist(std::vector<int> cond_shape, std::vector<Dist> rows)
    : cond_shape_(std::move(cond_shape)), rows_(std::move(rows)) {
  long long n = 1;
  for (int s : cond_shape_) n *= s;
  if (static_cast<long long>(rows_.size()) != n) throw ValidationError("CondDist: row count does not match conditioning shape");
  out_ = rows_.empty() ? 0 : rows_[0].size();
  for (const auto& r : rows_)
    if (r.size() != out_) throw ValidationError("CondDist: rows have different lengths");
}

CondDist::CondDist(std::vector<int> cond_shape, int out_size, std::vector<double> flat, double tol)
    : cond_shape_(std::move(cond_shape)), out_(out_size) {
  long long n = 1;
  for (int s : cond_shape_) n *= s;
  if (static_cast<long long>(flat.size()) != n * out_size) throw ValidationError("CondDist: flat size mismatch");
  for (long long r = 0; r < n; ++r) {
    std::vector<double> row(flat.begin() + r * out_size, flat.begin() + (r + 1) * out_size);
    try {
      rows_.emplace_back(std::move(row), tol);
    } catch (const ValidationError& e) {
      throw ValidationError("CondDist row " + std::to_string(r) + ": " + e.what());
    }
  }
}

int CondDist::row_index(std::span<const int> cond) const {
  return static_cast<int>(flatten(cond, cond_shape_));
}

JointDist SequenceType::to_joint(const std::vector<std::string>& axes) const {
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return JointDist(shape, axes, std::move(p));
}

Dist SequenceType::to_dist() const {
  if (shape.size() != 1) throw ValidationError("SequenceType::to_dist requires one axis");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return Dist(std::move(p));
}

ConstraintPolytope::ConstraintPolytope(int d, std::vector<std::vector<double>> a, std::vector<double> g)
    : dim(d), A(std::move(a)), gamma(std::move(g)) {
  if (A.size() != gamma.size()) throw ValidationError("polytope: row count of A differs from length of Gamma");
  for (std::size_t i = 0; i < A.size(); ++i)
    if (static_cast<int>(A[i].size()) != dim)
      throw ValidationError("polytope: row " + std::to_string(i) + " has wrong length");
}

ConstraintPolytope ConstraintPolytope::unconstrained(int d) { return ConstraintPolytope(d, {}, {}); }

ConstraintPolytope ConstraintPolytope::singleton(const Dist& p) {
  std::vector<std::vector<double>> a;
  std::vector<double> g;
  for (int i = 0; i < p.size(); ++i) {
    std::vector<double> e(p.size(), 0.0);
    e[i] = 1.0;
    a.push_back(e);
    g.push_back(p[i]);
    e[i] = -1.0;
    a.push_back(e);
    g.push_back(-p[i]);
  }
  return ConstraintPolytope(p.size(), std::move(a), std::move(g));
}

double ConstraintPolytope::row_value(int i, std::span<const double> p) const {
  double v = 0;
  for (int s = 0; s < dim; ++s) v += A[i][s] * p[s];
  return v;
}

double ConstraintPolytope::row_max_abs(int i) const {
  double m = 0;
  for (double v : A[i]) m = std::max(m, std::abs(v));
  return m;
}

bool polytope_contains(std::span<const double> p, const ConstraintPolytope& k, double tol) {
  if (static_cast<int>(p.size()) != k.dim) throw ValidationError("polytope_contains: dimension mismatch");
  for (int i = 0; i < k.rows(); ++i)
    if (k.row_value(i, p) > k.gamma[i] + tol) return false;
  return true;
}

bool polytope_contains(const Dist& p, const ConstraintPolytope& k, double tol) {
  return polytope_contains(std::span<const double>(p.pmf()), k, tol);
}

double entropy(std::span<const double> p) {
  double h = 0;
  for (double v : p) h -= plogp(v);
  return h;
}

double entropy(const Dist& p) { return entropy(std::span<const double>(p.pmf())); }

double entropy(const JointDist& p, const std::vector<std::string>& axes) {
  if (axes.empty()) return 0.0;
  return entropy(std::span<const double>(p.marginal(axes).pmf()));
}

double mutual_info(const JointDist& p, const std::vector<std::string>& a,
                   const std::vector<std::string>& b, const std::vector<std::string>& given) {
  std::set<std::string> all;
  for (const auto* g : {&a, &b, &given})
    for (const auto& name : *g) {
      p.axis(name);
      if (!all.insert(name).second) throw ValidationError("mutual_info: axis '" + name + "' used twice");
    }
  auto join = [](std::vector<std::string> x, const std::vector<std::string>& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };
  double v = entropy(p, join(a, given)) + entropy(p, join(b, given)) -
             entropy(p, join(join(a, b), given)) - entropy(p, given);
  return std::max(v, 0.0);
}

double mutual_info(const JointDist& p, const std::string& a, const std::string& b, const std::string& given) {
  std::vector<std::string> g;
  if (!given.empty()) g.push_back(given);
  return mutual_info(p, std::vector<std::string>{a}, std::vector<std::string>{b}, g);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("kl_divergence: shape mismatch");
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= kZeroTol) continue;
    if (q[i] <= kZeroTol) throw ValidationError("kl_divergence: support of P not contained in support of Q (index " + std::to_string(i) + ")");
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double kl_divergence(const Dist& p, const Dist& q) { return kl_divergence(p.pmf(), q.pmf()); }

double kl_divergence(const JointDist& p, const JointDist& q) {
  if (p.shape() != q.shape()) throw ValidationError("kl_divergence: shape mismatch");
  return kl_divergence(p.pmf(), q.pmf());
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("l1_distance: size mismatch");
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

SequenceType joint_type(const std::vector<std::vector<int>>& seqs, const std::vector<int>& alphabet_sizes) {
  if (seqs.empty()) throw ValidationError("joint_type: no sequences");
  if (seqs.size() != alphabet_sizes.size()) throw ValidationError("joint_type: one alphabet size per sequence required");
  std::size_t n = seqs[0].size();
  if (n == 0) throw ValidationError("joint_type: empty sequence");
  for (const auto& s : seqs)
    if (s.size() != n) throw ValidationError("joint_type: length mismatch");
  SequenceType t;
  t.shape = alphabet_sizes;
  long long cells = 1;
  for (int a : alphabet_sizes) cells *= a;
  t.counts.assign(cells, 0);
  t.n = static_cast<long long>(n);
  std::vector<int> idx(seqs.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      int v = seqs[k][j];
      if (v < 0 || v >= alphabet_sizes[k]) throw ValidationError("joint_type: symbol out of range");
      idx[k] = v;
    }
    ++t.counts[flatten(idx, t.shape)];
  }
  return t;
}

std::vector<long long> largest_remainder(std::span<const double> p, long long total) {
  std::vector<long long> c(p.size());
  std::vector<std::pair<double, std::size_t>> frac;
  long long used = 0;
  double mass = 0;
  for (double v : p) mass += v;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double exact = mass > 0 ? p[i] / mass * static_cast<double>(total) : 0.0;
    double fl = std::floor(exact + 1e-12);
    c[i] = static_cast<long long>(fl);
    used += c[i];
    frac.emplace_back(exact - fl, i);
  }
  // Largest fractional part first; lowest index on ties.
  std::stable_sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) { return a.first > b.first + 1e-15; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++c[frac[k % frac.size()].second];
  return c;
}

std::vector<std::vector<int>> compositions(int k, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k, 0);
  auto rec = [&](auto& self, int pos, int left) -> void {
    if (pos == k - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  if (k >= 1) rec(rec, 0, m);
  return out;
}

int net_denominator(int k, double eta) {
  if (!(eta > 0)) throw ValidationError("simplex_net: eta must be > 0");
  return static_cast<int>(std::ceil(k / (2.0 * eta) - 1e-12));
}

double net_size_bound(int k, double eta) { return std::pow(k / (2.0 * eta) + 1.0, k); }

std::vector<Dist> simplex_net(int k, double eta) {
  if (!(eta > 0)) throw ValidationError("simplex_net: eta must be > 0");
  if (k == 1 || eta >= 2.0 * (1.0 - 1.0 / k)) return {Dist::uniform(k)};
  int m = net_denominator(k, eta);
  std::vector<Dist> net;
  for (const auto& c : compositions(k, m)) {
    std::vector<double> p(k);
    for (int i = 0; i < k; ++i) p[i] = static_cast<double>(c[i]) / m;
    net.emplace_back(std::move(p));
  }
  return net;
}

int nearest_index(const std::vector<Dist>& net, std::span<const double> p) {
  int best = -1;
  double bd = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    double d = l1_distance(net[i].pmf(), p);
    if (best < 0 || d < bd - 1e-12) {
      best = static_cast<int>(i);
      bd = d;
    }
  }
  return best;
}

boost::multiprecision::cpp_int type_class_size(const SequenceType& t) {
  using boost::multiprecision::cpp_int;
  long long total = 0;
  for (long long c : t.counts) {
    if (c < 0) throw ValidationError("type_class_size: negative count");
    total += c;
  }
  if (total != t.n) throw ValidationError("type_class_size: counts do not sum to n");
  // n! / prod c! built incrementally as a product of binomials.
  cpp_int r = 1;
  long long acc = 0;
  for (long long c : t.counts) {
    for (long long i = 1; i <= c; ++i) {
      r *= (acc + i);
      r /= i;
    }
    acc += c;
  }
  return r;
}

TypeClassBounds type_class_bounds(const SequenceType& t) {
  TypeClassBounds b;
  auto size = type_class_size(t);
  // log2 of a cpp_int via its leading bits.
  unsigned bits = size == 0 ? 0 : static_cast<unsigned>(boost::multiprecision::msb(size)) + 1;
  if (bits <= 60) {
    b.log2_size = std::log2(static_cast<double>(size.convert_to<unsigned long long>()));
  } else {
    boost::multiprecision::cpp_int top = size >> (bits - 60);
    b.log2_size = std::log2(static_cast<double>(top.convert_to<unsigned long long>())) + (bits - 60);
  }
  std::vector<double> freq;
  for (long long c : t.counts) freq.push_back(static_cast<double>(c) / static_cast<double>(t.n));
  b.nH = static_cast<double>(t.n) * entropy(std::span<const double>(freq));
  long long cells = static_cast<long long>(t.counts.size());
  b.f = t.n > 0 ? static_cast<double>(cells - 1) * std::log2(static_cast<double>(t.n + 1)) / static_cast<double>(t.n) : 0;
  double lo = b.nH - t.n * b.f, hi = b.nH + t.n * b.f;
  b.within = b.log2_size >= lo - 1e-9 && b.log2_size <= hi + 1e-9;
  return b;
}

TypeProbCheck type_prob_bound_check(const CondDist& w, const JointDist& p, int n, long long budget) {
  if (p.rank() != 3) throw ValidationError("type_prob_bound_check: P must have axes (x,s,y)");
  int nx = p.shape()[0], ns = p.shape()[1], ny = p.shape()[2];
  if (w.num_rows() != nx * ns || w.out_size() != ny) throw ValidationError("type_prob_bound_check: W shape mismatch");
  if (ipow(ny, n) > budget) throw BudgetExceeded("type_prob_bound_check: |Y|^n exceeds budget");
  // Realize (x,s) with joint type P_{x,s}.
  std::vector<long long> target(p.numel());
  for (std::size_t i = 0; i < p.numel(); ++i) {
    double c = p.pmf()[i] * n;
    target[i] = std::llround(c);
    if (std::abs(c - static_cast<double>(target[i])) > 1e-9) throw ValidationError("type_prob_bound_check: P is not a type at this n");
  }
  std::vector<int> xs, ss;
  for (int x = 0; x < nx; ++x)
    for (int s = 0; s < ns; ++s) {
      long long c = 0;
      for (int y = 0; y < ny; ++y) c += target[(x * ns + s) * ny + y];
      for (long long k = 0; k < c; ++k) {
        xs.push_back(x);
        ss.push_back(s);
      }
    }
  TypeProbCheck r;
  std::vector<int> y(n, 0);
  std::vector<long long> cnt(p.numel());
  long long total = ipow(ny, n);
  for (long long f = 0; f < total; ++f) {
    long long g = f;
    for (int j = n - 1; j >= 0; --j) {
      y[j] = static_cast<int>(g % ny);
      g /= ny;
    }
    std::fill(cnt.begin(), cnt.end(), 0);
    double prob = 1;
    for (int j = 0; j < n; ++j) {
      ++cnt[(xs[j] * ns + ss[j]) * ny + y[j]];
      prob *= w(xs[j] * ns + ss[j], y[j]);
    }
    if (cnt == target) r.lhs += prob;
  }
  std::vector<double> ref(p.numel());
  JointDist pxs = p.marginal({p.axes()[0], p.axes()[1]});
  for (int x = 0; x < nx; ++x)
    for (int s = 0; s < ns; ++s)
      for (int yy = 0; yy < ny; ++yy) ref[(x * ns + s) * ny + yy] = pxs.pmf()[x * ns + s] * w(x * ns + s, yy);
  double d;
  try {
    d = kl_divergence(p.pmf(), ref);
    r.rhs = std::exp2(-n * d);
  } catch (const ValidationError&) {
    r.rhs = 0.0;
  }
  r.holds = r.lhs <= r.rhs * (1 + 1e-9) + 1e-15;
  return r;
}

}  // namespace avc
