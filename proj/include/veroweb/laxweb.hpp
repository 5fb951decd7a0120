#pragma once

#include <array>
#include <utility>
#include <vector>

#include "veroweb/expr.hpp"
#include "veroweb/linalg.hpp"

namespace veroweb {

/// Vector field on a 3-chart with components polynomial in the spectral
/// parameter: sum_k lambda^k coeffs[k]. Degree stays <= 2 (commutators of
/// degree-1 inputs close at degree 2).
struct LambdaVectorField {
  Chart chart;
  std::vector<std::array<Expr, 3>> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  /// Numeric components at (p, lambda).
  Vec3 eval(std::span<const double> p, double lambda, const Bindings& params = {}) const;
};

/// L0 = d_z - (w_z/w_x) d_x + lambda a d_z,  L1 = d_y - (w_y/w_x) d_x + lambda b d_y.
std::pair<LambdaVectorField, LambdaVectorField> hirota_lax(const Expr& w, double a, double b);

/// L0 = d_Y - lambda (d_T + H_Y d_X),  L1 = d_X - lambda (d_Y + H_X d_X).
std::pair<LambdaVectorField, LambdaVectorField> hypercr_lax(const Expr& H);

/// [L, M] as a lambda-polynomial vector field; coefficient k collects all
/// [coeff_i, coeff_j] with i + j = k.
LambdaVectorField commutator(const LambdaVectorField& L, const LambdaVectorField& M);

/// Left-hand sides of the three equation families at a point.
double hirota_residual(const Expr& w, double a, double b, std::span<const double> p,
                       const Bindings& params = {});
double hypercr_residual(const Expr& H, std::span<const double> p, const Bindings& params = {});

/// Residuals as expression trees (used for forcing terms and symbolic checks).
Expr hirota_residual_expr(const Expr& w, double a, double b);
Expr hypercr_residual_expr(const Expr& H);

/// Pairwise slice of the infinite hierarchy on chart (x, x0, ..., x_{n-1}).
struct HierarchySpec {
  std::vector<double> constants;  // pairwise distinct, nonzero
  Chart chart;

  static HierarchySpec make(std::vector<double> constants);
};

double hierarchy_residual(const Expr& w, const HierarchySpec& spec, int i, int j,
                          std::span<const double> p, const Bindings& params = {});

/// Hierarchy Lax field L_i = d_i - (d_i w / d_x w) d_x + lambda a_i d_i on the
/// (x, x_i, x_j) sub-chart; components ordered (x, x_i, x_j).
struct VeroneseTriple {
  std::array<Expr, 3> V1, V2, V3;
};

/// V1 = ab (a w_y d_z - b w_z d_y), V2 = ab (w_y d_z - w_z d_y),
/// V3 = b w_y d_z - a w_z d_y + (a-b) (w_y w_z / w_x) d_x.
VeroneseTriple veronese_fields(const Expr& w, double a, double b);

/// V(lambda) = V1 - 2 lambda V2 + lambda^2 V3 at p.
Vec3 veronese_eval(const VeroneseTriple& vt, double lambda, std::span<const double> p,
                   const Bindings& params = {});

/// Rank of the span of row vectors, rows normalized first; tol is the
/// residual-norm cutoff after Gram-Schmidt.
int span_rank(const std::vector<Vec3>& rows, double tol = 1e-8);

/// Joint rank of the Lax plane at lambda and the Veronese plane
/// (V1 - mu V2, V2 - mu V3) at mu; 2 means the same plane.
int span_compare(const LambdaVectorField& L0, const LambdaVectorField& L1,
                 const VeroneseTriple& vt, double lambda, double mu, std::span<const double> p,
                 const Bindings& params = {}, double tol = 1e-8);

/// Uniform points in the box with near-degenerate gradients of w rejected
/// (any |w_i| < min_grad).
std::vector<Vec3> sample_admissible_points(const Expr& w, const Chart& chart, const Vec3& lo,
                                           const Vec3& hi, int count, uint64_t seed,
                                           double min_grad = 1e-6, const Bindings& params = {});

}  // namespace veroweb
