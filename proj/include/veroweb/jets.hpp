#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace veroweb {

/// Thrown when an operation hits an input the formulas are singular at
/// (division or ln/sqrt with a near-zero constant term, degenerate gradients).
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

/// Derivative/monomial exponent tuple. order == |alpha|.
using MultiIndex = std::vector<int>;

int multi_index_order(const MultiIndex& alpha);
double multi_index_factorial(const MultiIndex& alpha);

/// Shared tables for all jets of a given (dim, order): the graded-lex list of
/// multi-indices, rank lookup, and the truncated-product index map.
/// Instances are interned; Jet stores a pointer and never copies the tables.
class JetSpace {
 public:
  static const JetSpace& get(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(indices_.size()); }

  const MultiIndex& index_at(int rank) const { return indices_[rank]; }
  /// Rank of alpha, or -1 when |alpha| exceeds the truncation order.
  int rank_of(const MultiIndex& alpha) const;

  /// Rank of the product monomial for coefficient ranks (i, j); -1 if truncated.
  int product_rank(int i, int j) const { return product_[static_cast<size_t>(i) * indices_.size() + j]; }

 private:
  JetSpace(int dim, int order);

  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<uint64_t, int> rank_;
  std::vector<int32_t> product_;
};

/// Truncated Taylor expansion of a scalar field at a point: one coefficient
/// c_alpha = (d^alpha f)(point) / alpha! per |alpha| <= order.
/// Jets are immutable values; every operation returns a fresh jet.
class Jet {
 public:
  Jet(const JetSpace& space, std::span<const double> point);

  static Jet constant(const JetSpace& space, std::span<const double> point, double value);
  static Jet coordinate(const JetSpace& space, std::span<const double> point, int axis);
  static Jet from_coeffs(const JetSpace& space, std::span<const double> point,
                         std::vector<double> coeffs);

  const JetSpace& space() const { return *space_; }
  int dim() const { return space_->dim(); }
  int order() const { return space_->order(); }
  const std::vector<double>& point() const { return point_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  double value() const { return coeffs_[0]; }
  double coeff(const MultiIndex& alpha) const;
  /// Exact derivative d^alpha f = c_alpha * alpha!.
  double derivative(const MultiIndex& alpha) const;

  bool finite() const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator-(double a, const Jet& b);
  friend Jet operator-(const Jet& a);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(double a, const Jet& b);
  friend Jet operator/(Jet a, double b);

  friend Jet exp(const Jet& a);
  friend Jet ln(const Jet& a);
  friend Jet sqrt(const Jet& a);
  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);
  friend Jet pow_int(const Jet& a, int k);
  friend Jet jet_partial(const Jet& a, int axis);

 private:
  static void check_compatible(const Jet& a, const Jet& b);
  /// Horner evaluation of sum_k series[k] * (a - a0)^k over the jet algebra.
  static Jet compose_series(const Jet& a, std::span<const double> series);
  Jet reciprocal() const;

  const JetSpace* space_;
  std::vector<double> point_;
  std::vector<double> coeffs_;
};

/// Jet of the partial derivative along one axis, one order lower.
Jet jet_partial(const Jet& a, int axis);

/// Smallest constant-term magnitude accepted by division, ln and sqrt.
inline constexpr double kJetMinConstantTerm = 1e-12;

}  // namespace veroweb
