#include "veroweb/jets.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace veroweb {

namespace {

uint64_t pack_exponents(const MultiIndex& alpha) {
  uint64_t key = 0;
  for (int e : alpha) key = (key << 8) | static_cast<uint64_t>(e & 0xff);
  return key;
}

// All compositions of `degree` into `dim` slots, lexicographic.
void emit_degree(int dim, int degree, MultiIndex& scratch, int axis,
                 std::vector<MultiIndex>& out) {
  if (axis == dim - 1) {
    scratch[axis] = degree;
    out.push_back(scratch);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    scratch[axis] = e;
    emit_degree(dim, degree - e, scratch, axis + 1, out);
  }
}

}  // namespace

int multi_index_order(const MultiIndex& alpha) {
  int s = 0;
  for (int e : alpha) s += e;
  return s;
}

double multi_index_factorial(const MultiIndex& alpha) {
  double f = 1.0;
  for (int e : alpha)
    for (int k = 2; k <= e; ++k) f *= k;
  return f;
}

JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > 8) throw std::invalid_argument("JetSpace: dim must be in [1,8]");
  if (order < 0 || order > 8) throw std::invalid_argument("JetSpace: order must be in [0,8]");
  MultiIndex scratch(dim, 0);
  for (int degree = 0; degree <= order; ++degree) emit_degree(dim, degree, scratch, 0, indices_);
  rank_.reserve(indices_.size());
  for (int r = 0; r < static_cast<int>(indices_.size()); ++r) rank_[pack_exponents(indices_[r])] = r;

  const size_t n = indices_.size();
  product_.assign(n * n, -1);
  MultiIndex sum(dim, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (multi_index_order(indices_[i]) + multi_index_order(indices_[j]) > order) continue;
      for (int d = 0; d < dim; ++d) sum[d] = indices_[i][d] + indices_[j][d];
      product_[i * n + j] = rank_.at(pack_exponents(sum));
    }
  }
}

const JetSpace& JetSpace::get(int dim, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dim, order}];
  if (!slot) slot.reset(new JetSpace(dim, order));
  return *slot;
}

int JetSpace::rank_of(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != dim_)
    throw std::invalid_argument("MultiIndex dimension mismatch");
  if (multi_index_order(alpha) > order_) return -1;
  return rank_.at(pack_exponents(alpha));
}

Jet::Jet(const JetSpace& space, std::span<const double> point)
    : space_(&space), point_(point.begin(), point.end()), coeffs_(space.size(), 0.0) {
  if (static_cast<int>(point_.size()) != space.dim())
    throw std::invalid_argument("Jet: point dimension mismatch");
}

Jet Jet::constant(const JetSpace& space, std::span<const double> point, double value) {
  Jet j(space, point);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::from_coeffs(const JetSpace& space, std::span<const double> point,
                     std::vector<double> coeffs) {
  if (static_cast<int>(coeffs.size()) != space.size())
    throw std::invalid_argument("Jet::from_coeffs: coefficient count mismatch");
  Jet j(space, point);
  j.coeffs_ = std::move(coeffs);
  return j;
}

Jet Jet::coordinate(const JetSpace& space, std::span<const double> point, int axis) {
  if (axis < 0 || axis >= space.dim()) throw std::invalid_argument("Jet::coordinate: axis out of range");
  Jet j(space, point);
  j.coeffs_[0] = point[axis];
  if (space.order() >= 1) {
    MultiIndex alpha(space.dim(), 0);
    alpha[axis] = 1;
    j.coeffs_[space.rank_of(alpha)] = 1.0;
  }
  return j;
}

double Jet::coeff(const MultiIndex& alpha) const {
  const int r = space_->rank_of(alpha);
  if (r < 0) throw std::invalid_argument("Jet::coeff: |alpha| exceeds jet order");
  return coeffs_[r];
}

double Jet::derivative(const MultiIndex& alpha) const {
  return coeff(alpha) * multi_index_factorial(alpha);
}

bool Jet::finite() const {
  for (double c : coeffs_)
    if (!std::isfinite(c)) return false;
  return true;
}

void Jet::check_compatible(const Jet& a, const Jet& b) {
  if (a.space_ != b.space_) throw std::invalid_argument("jet shape mismatch (dim/order)");
  if (a.point_ != b.point_) throw std::invalid_argument("jet base point mismatch");
}

Jet& Jet::operator+=(const Jet& rhs) {
  check_compatible(*this, rhs);
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  check_compatible(*this, rhs);
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator+=(double rhs) {
  coeffs_[0] += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) {
  coeffs_[0] -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) {
  for (double& c : coeffs_) c *= rhs;
  return *this;
}

Jet operator-(double a, const Jet& b) {
  Jet r = -b;
  r.coeffs_[0] += a;
  return r;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  for (double& c : r.coeffs_) c = -c;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet::check_compatible(a, b);
  const JetSpace& s = *a.space_;
  Jet r(s, a.point_);
  const int n = s.size();
  for (int i = 0; i < n; ++i) {
    const double ai = a.coeffs_[i];
    if (ai == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const int t = s.product_rank(i, j);
      if (t >= 0) r.coeffs_[t] += ai * b.coeffs_[j];
    }
  }
  return r;
}

Jet Jet::compose_series(const Jet& a, std::span<const double> series) {
  Jet u = a;
  u.coeffs_[0] = 0.0;  // pure (nilpotent) part
  Jet r = Jet::constant(*a.space_, a.point_, series.back());
  for (int k = static_cast<int>(series.size()) - 2; k >= 0; --k) {
    r = r * u;
    r.coeffs_[0] += series[k];
  }
  return r;
}

Jet Jet::reciprocal() const {
  const double c0 = coeffs_[0];
  if (std::abs(c0) < kJetMinConstantTerm)
    throw DegenerateInputError("jet division: constant term below 1e-12");
  // 1/(c0 + u) = (1/c0) sum_k (-u/c0)^k
  std::vector<double> series(order() + 1);
  double t = 1.0 / c0;
  for (int k = 0; k <= order(); ++k) {
    series[k] = t;
    t *= -1.0 / c0;
  }
  return compose_series(*this, series);
}

Jet operator/(const Jet& a, const Jet& b) {
  Jet::check_compatible(a, b);
  return a * b.reciprocal();
}

Jet operator/(double a, const Jet& b) { return b.reciprocal() * a; }

Jet operator/(Jet a, double b) {
  if (std::abs(b) < kJetMinConstantTerm)
    throw DegenerateInputError("jet division by scalar below 1e-12");
  return a *= (1.0 / b);
}

Jet exp(const Jet& a) {
  std::vector<double> series(a.order() + 1);
  double t = std::exp(a.value());
  for (int k = 0; k <= a.order(); ++k) {
    series[k] = t;
    t /= (k + 1);
  }
  return Jet::compose_series(a, series);
}

Jet ln(const Jet& a) {
  const double c0 = a.value();
  if (c0 < kJetMinConstantTerm)
    throw DegenerateInputError("jet ln: constant term must be positive (>= 1e-12)");
  // d^k ln at c0: (-1)^(k+1) (k-1)! / c0^k, so series coeff (-1)^(k+1)/(k c0^k).
  std::vector<double> series(a.order() + 1);
  series[0] = std::log(c0);
  double p = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    p /= c0;
    series[k] = (k % 2 ? p : -p) / k;
  }
  return Jet::compose_series(a, series);
}

Jet sqrt(const Jet& a) {
  const double c0 = a.value();
  if (c0 < kJetMinConstantTerm)
    throw DegenerateInputError("jet sqrt: constant term must be positive (>= 1e-12)");
  // Binomial series: sqrt(c0) * sum_k C(1/2, k) (u/c0)^k.
  std::vector<double> series(a.order() + 1);
  double t = std::sqrt(c0);
  double binom = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    series[k] = t * binom;
    binom *= (0.5 - k) / (k + 1);
    t /= c0;
  }
  return Jet::compose_series(a, series);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  std::vector<double> series(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact /= k;
    const double cycle[4] = {s, c, -s, -c};
    series[k] = cycle[k % 4] * fact;
  }
  return Jet::compose_series(a, series);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  std::vector<double> series(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact /= k;
    const double cycle[4] = {c, -s, -c, s};
    series[k] = cycle[k % 4] * fact;
  }
  return Jet::compose_series(a, series);
}

Jet jet_partial(const Jet& a, int axis) {
  const JetSpace& s = a.space();
  if (axis < 0 || axis >= s.dim()) throw std::invalid_argument("jet_partial: axis out of range");
  if (s.order() < 1) throw std::invalid_argument("jet_partial: jet order must be >= 1");
  const JetSpace& t = JetSpace::get(s.dim(), s.order() - 1);
  Jet r(t, a.point_);
  for (int q = 0; q < t.size(); ++q) {
    MultiIndex beta = t.index_at(q);
    beta[axis] += 1;
    r.coeffs_[q] = a.coeffs_[s.rank_of(beta)] * beta[axis];
  }
  return r;
}

Jet pow_int(const Jet& a, int k) {
  if (k < 0) return pow_int(a.reciprocal(), -k);
  Jet r = Jet::constant(*a.space_, a.point_, 1.0);
  Jet base = a;
  int e = k;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

}  // namespace veroweb
