// Finite-alphabet probability core: distributions, types, information
// measures (bits), simplex nets and constraint polytopes.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace avc {

inline constexpr double kNormTol = 1e-9;
inline constexpr double kZeroTol = 1e-15;
inline constexpr long long kDefaultBudget = 1'000'000;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Alphabet {
  int size = 1;
  std::vector<std::string> labels;

  Alphabet() = default;
  explicit Alphabet(int n, std::vector<std::string> names = {});
  std::string label(int i) const;
};

class Dist {
 public:
  Dist() = default;
  explicit Dist(std::vector<double> pmf, double tol = kNormTol);

  static Dist uniform(int k);
  static Dist point(int k, int i);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }
  const std::vector<double>& pmf() const { return p_; }
  bool operator==(const Dist&) const = default;

 private:
  std::vector<double> p_;
};

// Row-major multi-axis array of probabilities with named axes.
class JointDist {
 public:
  JointDist() = default;
  JointDist(std::vector<int> shape, std::vector<std::string> axes,
            std::vector<double> pmf, double tol = kNormTol);

  static JointDist from_dist(const Dist& p, const std::string& axis);
  // Independent product P_1 x ... x P_k.
  static JointDist product(const std::vector<Dist>& factors,
                           const std::vector<std::string>& axes);

  const std::vector<int>& shape() const { return shape_; }
  const std::vector<std::string>& axes() const { return axes_; }
  const std::vector<double>& pmf() const { return p_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t numel() const { return p_.size(); }

  int axis(const std::string& name) const;
  bool has_axis(const std::string& name) const;
  double at(std::span<const int> idx) const;

  // Marginal onto the listed axes, in the listed order.
  JointDist marginal(const std::vector<std::string>& keep) const;
  Dist to_dist() const;

 private:
  std::vector<int> shape_;
  std::vector<std::string> axes_;
  std::vector<double> p_;
};

// Conditional law: one Dist per flattened conditioning tuple.
class CondDist {
 public:
  CondDist() = default;
  CondDist(std::vector<int> cond_shape, std::vector<Dist> rows);
  CondDist(std::vector<int> cond_shape, int out_size, std::vector<double> flat,
           double tol = kNormTol);

  int out_size() const { return out_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<int>& cond_shape() const { return cond_shape_; }
  const Dist& row(int r) const { return rows_[r]; }
  const std::vector<Dist>& rows() const { return rows_; }
  double operator()(int r, int o) const { return rows_[r][o]; }
  int row_index(std::span<const int> cond) const;

 private:
  std::vector<int> cond_shape_;
  int out_ = 0;
  std::vector<Dist> rows_;
};

struct SequenceType {
  std::vector<int> shape;
  std::vector<long long> counts;
  long long n = 0;

  JointDist to_joint(const std::vector<std::string>& axes) const;
  Dist to_dist() const;
};

// { P : A P <= gamma }.
struct ConstraintPolytope {
  int dim = 0;
  std::vector<std::vector<double>> A;
  std::vector<double> gamma;

  ConstraintPolytope() = default;
  ConstraintPolytope(int d, std::vector<std::vector<double>> a,
                     std::vector<double> g);
  static ConstraintPolytope unconstrained(int d);
  // {P} as a pair of inequalities per coordinate.
  static ConstraintPolytope singleton(const Dist& p);

  int rows() const { return static_cast<int>(A.size()); }
  double row_value(int i, std::span<const double> p) const;
  // B_i* = max_s |B_i(s)|
  double row_max_abs(int i) const;
};

bool polytope_contains(std::span<const double> p, const ConstraintPolytope& k,
                       double tol = kNormTol);
bool polytope_contains(const Dist& p, const ConstraintPolytope& k,
                       double tol = kNormTol);

// Row-major index helpers.
std::vector<long long> strides_of(const std::vector<int>& shape);
void unflatten(long long flat, const std::vector<int>& shape, std::vector<int>& out);
long long flatten(std::span<const int> idx, const std::vector<int>& shape);
long long ipow(long long b, int e);

double entropy(const Dist& p);
double entropy(std::span<const double> p);
double entropy(const JointDist& p, const std::vector<std::string>& axes);
double mutual_info(const JointDist& p, const std::vector<std::string>& a,
                   const std::vector<std::string>& b,
                   const std::vector<std::string>& given = {});
double mutual_info(const JointDist& p, const std::string& a, const std::string& b,
                   const std::string& given = "");
// Throws ValidationError on an absolute-continuity violation.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double kl_divergence(const Dist& p, const Dist& q);
double kl_divergence(const JointDist& p, const JointDist& q);
double l1_distance(std::span<const double> a, std::span<const double> b);

SequenceType joint_type(const std::vector<std::vector<int>>& seqs,
                        const std::vector<int>& alphabet_sizes);

// Largest-remainder apportionment of total m according to weights p.
std::vector<long long> largest_remainder(std::span<const double> p, long long total);
// All nonnegative integer vectors of length k summing to m, lexicographic.
std::vector<std::vector<int>> compositions(int k, int m);

int net_denominator(int k, double eta);
double net_size_bound(int k, double eta);
std::vector<Dist> simplex_net(int k, double eta);
// Index of the closest net point (l1, lowest index on ties).
int nearest_index(const std::vector<Dist>& net, std::span<const double> p);

boost::multiprecision::cpp_int type_class_size(const SequenceType& t);

struct TypeClassBounds {
  double log2_size = 0;
  double nH = 0;  // n * H(type)
  double f = 0;   // slack per symbol
  bool within = false;
};
TypeClassBounds type_class_bounds(const SequenceType& t);

struct TypeProbCheck {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};
// W indexed [(x,s)] -> y; P over axes (x,s,y) with n-realizable masses.
TypeProbCheck type_prob_bound_check(const CondDist& w, const JointDist& p, int n,
                                    long long budget = kDefaultBudget);

}  // namespace avc
