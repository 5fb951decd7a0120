#pragma once

#include <array>
#include <span>

#include "veroweb/expr.hpp"
#include "veroweb/linalg.hpp"

namespace veroweb {

/// Metric representative plus Weyl one-form on a 3-coordinate chart.
/// (h, w) and (phi^2 h, w + 2 d ln phi) describe the same Weyl structure.
struct WeylStructure {
  Chart chart;
  Mat3T<Expr> h;
  std::array<Expr, 3> omega;
};

struct CurvatureReport {
  std::array<double, 3> point{};
  Chart chart;
  double gamma[3][3][3]{};  // gamma[k][i][j], symmetric in (i,j)
  Mat3 ricci{};
  double scalar = 0.0;
  Mat3 E{};  // trace-free Einstein-Weyl residual

  double e_norm() const;
  std::string to_json() const;
};

/// Weyl structure attached to a scalar field w(x,y,z) with spectral
/// constants a != b (both nonzero).
WeylStructure hirota_weyl(const Expr& w, double a, double b);

/// Weyl structure attached to H(X,Y,T):
/// h = (dY + H_X dT)^2 - 4 (dX - H_Y dT) dT,
/// w = H_XX dY + (H_X H_XX + 2 H_XY) dT.
WeylStructure hypercr_weyl(const Expr& H);

/// Christoffel symbols, Ricci data and the trace-free Einstein-Weyl residual
/// at a point, all derivatives taken exactly through jets.
CurvatureReport curvature(const WeylStructure& W, std::span<const double> p,
                          const Bindings& params = {});

/// (h, w) -> (phi^2 h, w + 2 dphi/phi).
WeylStructure conformal_rescale(const WeylStructure& W, const Expr& phi);

/// Throws DegenerateInputError unless phi > 1e-12 at p.
void require_positive(const Expr& phi, const Chart& chart, std::span<const double> p,
                      const Bindings& params = {});

/// Metric and one-form values at a point.
Mat3 weyl_metric_at(const WeylStructure& W, std::span<const double> p, const Bindings& params = {});
Vec3 weyl_oneform_at(const WeylStructure& W, std::span<const double> p, const Bindings& params = {});

/// Lie derivative (L_V h)_ij at p for a metric of Expr entries and vector
/// field of Expr components.
Mat3 lie_derivative_metric(const Chart& chart, const Mat3T<Expr>& h,
                           const std::array<Expr, 3>& V, std::span<const double> p,
                           const Bindings& params = {});

/// Four vector fields W1..W4 on base x (tau line), with the symmetry
/// K = d/dtau; the neutral-signature inverse metric is W1.W4 - W2.W3.
struct KillingExtension {
  Chart chart4;                              // (x, y, z, tau)
  std::array<std::array<Expr, 4>, 4> W{};   // W[k][component]
};

/// Lax-pair extension L0' = L0 + d/dtau, L1' = L1 for the Hirota field w.
KillingExtension hirota_extension(const Expr& w, double a, double b);

/// Symmetry reduction of the 4-dimensional extension:
/// h = |K|^-2 g - |K|^-4 K (x) K restricted to the base,
/// w = 2 |K|^-2 *_g (K ^ dK), orientation dx^dy^dz^dtau = +1.
WeylStructure jones_tod_reduce(const KillingExtension& ext);

/// |K|^2 at p; used to report null-symmetry inputs before evaluation
/// divides by it.
double killing_norm2_at(const KillingExtension& ext, std::span<const double> p,
                        const Bindings& params = {});

}  // namespace veroweb
