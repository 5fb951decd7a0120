#include "veroweb/laxweb.hpp"

#include <cmath>
#include <random>

namespace veroweb {

Vec3 LambdaVectorField::eval(std::span<const double> p, double lambda,
                             const Bindings& params) const {
  Vec3 v{0.0, 0.0, 0.0};
  double lk = 1.0;
  for (const auto& coeff : coeffs) {
    for (int i = 0; i < 3; ++i)
      if (!coeff[i].empty()) v[i] += lk * eval_jet(coeff[i], chart, p, 0, params).value();
    lk *= lambda;
  }
  return v;
}

std::pair<LambdaVectorField, LambdaVectorField> hirota_lax(const Expr& w, double a, double b) {
  if (a == b || a == 0.0 || b == 0.0)
    throw std::invalid_argument("hirota_lax: need a != b, both nonzero");
  const Expr wx = diff(w, "x"), wy = diff(w, "y"), wz = diff(w, "z");
  const Expr zero = Expr::constant(0.0), one = Expr::constant(1.0);
  LambdaVectorField L0{Chart::xyz(), {{-(wz / wx), zero, one}, {zero, zero, Expr::constant(a)}}};
  LambdaVectorField L1{Chart::xyz(), {{-(wy / wx), one, zero}, {zero, Expr::constant(b), zero}}};
  return {L0, L1};
}

std::pair<LambdaVectorField, LambdaVectorField> hypercr_lax(const Expr& H) {
  const Expr HX = diff(H, "X"), HY = diff(H, "Y");
  const Expr zero = Expr::constant(0.0), one = Expr::constant(1.0);
  LambdaVectorField L0{Chart::XYT(), {{zero, one, zero}, {-HY, zero, Expr::constant(-1.0)}}};
  LambdaVectorField L1{Chart::XYT(), {{one, zero, zero}, {-HX, Expr::constant(-1.0), zero}}};
  return {L0, L1};
}

LambdaVectorField commutator(const LambdaVectorField& L, const LambdaVectorField& M) {
  if (L.chart.names != M.chart.names)
    throw std::invalid_argument("commutator: chart mismatch");
  const Chart& c = L.chart;
  const int degree = L.degree() + M.degree();
  LambdaVectorField R{c, {}};
  R.coeffs.assign(degree + 1, {Expr::constant(0.0), Expr::constant(0.0), Expr::constant(0.0)});
  for (int i = 0; i <= L.degree(); ++i)
    for (int j = 0; j <= M.degree(); ++j) {
      for (int k = 0; k < 3; ++k) {
        // [A, B]^k = A^m d_m B^k - B^m d_m A^k
        Expr s = Expr::constant(0.0);
        for (int m = 0; m < 3; ++m)
          s = s + L.coeffs[i][m] * diff(M.coeffs[j][k], c.names[m]) -
              M.coeffs[j][m] * diff(L.coeffs[i][k], c.names[m]);
        R.coeffs[i + j][k] = R.coeffs[i + j][k] + s;
      }
    }
  return R;
}

double hirota_residual(const Expr& w, double a, double b, std::span<const double> p,
                       const Bindings& params) {
  const Jet j = eval_jet(w, Chart::xyz(), p, 2, params);
  const double wx = j.derivative({1, 0, 0}), wy = j.derivative({0, 1, 0}),
               wz = j.derivative({0, 0, 1});
  const double wyz = j.derivative({0, 1, 1}), wzx = j.derivative({1, 0, 1}),
               wxy = j.derivative({1, 1, 0});
  return (b - a) * wx * wyz + a * wy * wzx - b * wz * wxy;
}

double hypercr_residual(const Expr& H, std::span<const double> p, const Bindings& params) {
  const Jet j = eval_jet(H, Chart::XYT(), p, 2, params);
  const double HX = j.derivative({1, 0, 0}), HY = j.derivative({0, 1, 0});
  const double HXT = j.derivative({1, 0, 1}), HYY = j.derivative({0, 2, 0}),
               HXX = j.derivative({2, 0, 0}), HXY = j.derivative({1, 1, 0});
  return HXT - HYY + HY * HXX - HX * HXY;
}

Expr hirota_residual_expr(const Expr& w, double a, double b) {
  const Expr wx = diff(w, "x"), wy = diff(w, "y"), wz = diff(w, "z");
  return (b - a) * wx * diff(wy, "z") + a * wy * diff(wz, "x") - b * wz * diff(wx, "y");
}

Expr hypercr_residual_expr(const Expr& H) {
  const Expr HX = diff(H, "X"), HY = diff(H, "Y");
  return diff(HX, "T") - diff(HY, "Y") + HY * diff(HX, "X") - HX * diff(HX, "Y");
}

HierarchySpec HierarchySpec::make(std::vector<double> constants) {
  const int n = static_cast<int>(constants.size());
  if (n < 2 || n > 8) throw std::invalid_argument("HierarchySpec: need 2..8 constants");
  for (int i = 0; i < n; ++i) {
    if (constants[i] == 0.0) throw std::invalid_argument("HierarchySpec: constants must be nonzero");
    for (int j = i + 1; j < n; ++j)
      if (constants[i] == constants[j])
        throw std::invalid_argument("HierarchySpec: constants must be pairwise distinct");
  }
  return {std::move(constants), Chart::hierarchy(n)};
}

double hierarchy_residual(const Expr& w, const HierarchySpec& spec, int i, int j,
                          std::span<const double> p, const Bindings& params) {
  const int n = static_cast<int>(spec.constants.size());
  if (i == j || i < 0 || j < 0 || i >= n || j >= n)
    throw std::invalid_argument("hierarchy_residual: need distinct indices in range");
  const Jet jw = eval_jet(w, spec.chart, p, 2, params);
  const int dim = spec.chart.dim();
  const auto d1 = [&](int axis) {
    MultiIndex a(dim, 0);
    a[axis] = 1;
    return jw.derivative(a);
  };
  const auto d2 = [&](int ax1, int ax2) {
    MultiIndex a(dim, 0);
    a[ax1] += 1;
    a[ax2] += 1;
    return jw.derivative(a);
  };
  const int xi = i + 1, xj = j + 1;  // chart is (x, x0, x1, ...)
  const double ai = spec.constants[i], aj = spec.constants[j];
  return (ai - aj) * d1(0) * d2(xi, xj) + aj * d1(xi) * d2(xj, 0) - ai * d1(xj) * d2(xi, 0);
}

VeroneseTriple veronese_fields(const Expr& w, double a, double b) {
  if (a == b || a == 0.0 || b == 0.0)
    throw std::invalid_argument("veronese_fields: need a != b, both nonzero");
  const Expr wx = diff(w, "x"), wy = diff(w, "y"), wz = diff(w, "z");
  const Expr zero = Expr::constant(0.0);
  VeroneseTriple vt;
  vt.V1 = {zero, Expr::constant(-a * b * b) * wz, Expr::constant(a * a * b) * wy};
  vt.V2 = {zero, Expr::constant(-a * b) * wz, Expr::constant(a * b) * wy};
  vt.V3 = {Expr::constant(a - b) * wy * wz / wx, Expr::constant(-a) * wz, Expr::constant(b) * wy};
  return vt;
}

Vec3 veronese_eval(const VeroneseTriple& vt, double lambda, std::span<const double> p,
                   const Bindings& params) {
  const Chart c = Chart::xyz();
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    const double v1 = eval_jet(vt.V1[k], c, p, 0, params).value();
    const double v2 = eval_jet(vt.V2[k], c, p, 0, params).value();
    const double v3 = eval_jet(vt.V3[k], c, p, 0, params).value();
    v[k] = v1 - 2.0 * lambda * v2 + lambda * lambda * v3;
  }
  return v;
}

int span_rank(const std::vector<Vec3>& rows, double tol) {
  std::vector<Vec3> basis;
  for (Vec3 r : rows) {
    const double n0 = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (n0 < 1e-300) continue;
    for (double& x : r) x /= n0;
    for (int pass = 0; pass < 2; ++pass)  // re-orthogonalize for stability
      for (const Vec3& b : basis) {
        const double d = r[0] * b[0] + r[1] * b[1] + r[2] * b[2];
        for (int k = 0; k < 3; ++k) r[k] -= d * b[k];
      }
    const double n = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (n > tol) {
      for (double& x : r) x /= n;
      basis.push_back(r);
    }
  }
  return static_cast<int>(basis.size());
}

int span_compare(const LambdaVectorField& L0, const LambdaVectorField& L1,
                 const VeroneseTriple& vt, double lambda, double mu, std::span<const double> p,
                 const Bindings& params, double tol) {
  const Chart& c = L0.chart;
  Vec3 c1{}, c2{};
  for (int i = 0; i < 3; ++i) {
    const double a1 = eval_jet(vt.V1[i], c, p, 0, params).value();
    const double a2 = eval_jet(vt.V2[i], c, p, 0, params).value();
    const double a3 = eval_jet(vt.V3[i], c, p, 0, params).value();
    c1[i] = a1 - mu * a2;
    c2[i] = a2 - mu * a3;
  }
  return span_rank({L0.eval(p, lambda, params), L1.eval(p, lambda, params), c1, c2}, tol);
}

std::vector<Vec3> sample_admissible_points(const Expr& w, const Chart& chart, const Vec3& lo,
                                           const Vec3& hi, int count, uint64_t seed,
                                           double min_grad, const Bindings& params) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Vec3> pts;
  pts.reserve(count);
  int attempts = 0;
  while (static_cast<int>(pts.size()) < count) {
    if (++attempts > 1000 * count)
      throw std::runtime_error("sample_admissible_points: rejection rate too high");
    Vec3 p;
    for (int i = 0; i < 3; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * u01(rng);
    const Jet j = eval_jet(w, chart, p, 1, params);
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      MultiIndex a(3, 0);
      a[i] = 1;
      if (std::abs(j.derivative(a)) < min_grad) ok = false;
    }
    if (ok) pts.push_back(p);
  }
  return pts;
}

}  // namespace veroweb
