#pragma once

#include <memory>
#include <string>
#include <vector>

#include "veroweb/expr.hpp"
#include "veroweb/linalg.hpp"

namespace veroweb {

/// Thrown by the series recursion when the two gradient equations are
/// incompatible beyond tolerance (the field is not a solution).
class RecursionConsistencyError : public std::runtime_error {
 public:
  explicit RecursionConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

/// Coefficients psi_0 = T, psi_1 = Y, psi_2 = X, psi_3, ... of the
/// lambda-expansion of a twistor function for H(X,Y,T). Members past psi_2
/// are built by integrating
///   d_X psi_{i+1} = (d_Y + H_X d_X) psi_i,
///   d_Y psi_{i+1} = (d_T + H_Y d_X) psi_i
/// along X at Y = 0 and then along Y, normalized by psi_{i+1}(0,0,T) = 0.
/// All derivative queries resolve through those relations; only the value and
/// pure-T coefficients need quadrature.
class TwistorSeries {
 public:
  explicit TwistorSeries(Expr H, Bindings params = {}, double consistency_tol = 1e-8);

  const Expr& H() const { return H_; }
  int max_index() const { return max_index_; }

  /// Makes psi_0..psi_upto available; checks the mixed-derivative consistency
  /// of each step on a sample box and throws RecursionConsistencyError when it
  /// exceeds the tolerance.
  void extend(int upto);

  /// Jet of psi_i at p (chart (X,Y,T)).
  Jet psi_jet(int i, std::span<const double> p, int order) const;
  double psi_value(int i, std::span<const double> p) const;

  /// (d_X d_T - d_Y^2 + H_Y d_X^2 - H_X d_X d_Y) psi_i at p.
  double wave_residual(int i, std::span<const double> p) const;

  /// Compatibility defect d_X[(d_T + H_Y d_X) psi_i] - d_Y[(d_Y + H_X d_X) psi_i]
  /// of the step psi_i -> psi_{i+1}; equals the flow residual when i >= 3.
  double consistency_residual(int i, std::span<const double> p) const;

 private:
  Jet d_for_x(int i, std::span<const double> p, int order) const;  // (d_Y + H_X d_X) psi_i
  Jet d_for_y(int i, std::span<const double> p, int order) const;  // (d_T + H_Y d_X) psi_i
  // with_pure_T = false skips the quadrature for the value and pure-T
  // coefficients; valid whenever the caller only reads shifted slots (d_for_x).
  Jet psi_jet_impl(int i, std::span<const double> p, int order, bool with_pure_T) const;

  Expr H_;
  Bindings params_;
  double consistency_tol_;
  int max_index_;
};

/// Three-parameter family of sections lambda -> (lambda, psi(m, lambda)),
/// psi an expression on the chart (m0, m1, m2, l).
struct CurveFamily {
  Expr psi;
  Bindings params;
};

CurveFamily curve_family_from_json(const std::string& json_text);

struct ExtractResult {
  double T = 0, Y = 0, X = 0, H = 0;
  Vec3 dH{};    // dH/d(T, Y, X)
  Mat3 d2H{};   // second derivatives, same index order
  double hypercr_residual = 0.0;

  double H_T() const { return dH[0]; }
  double H_Y() const { return dH[1]; }
  double H_X() const { return dH[2]; }
};

/// Coordinates T = psi|_0, Y = d_l psi|_0, X = (1/2) d_l^2 psi|_0 and the
/// third-jet coefficient H, with H-derivatives chain-ruled through the
/// inverted Jacobian d(T,Y,X)/dm. The input jet lives on (m0, m1, m2, l),
/// order >= 5, based at lambda = 0.
ExtractResult extract_coordinates(const Jet& psi_jet);
ExtractResult extract_coordinates(const CurveFamily& cf, const Vec3& m);

/// Patching vector field f d_psi + g (pi0 d_pi0 + pi1 d_pi1) with f, g
/// expressions in (psi, pi0, pi1), homogeneous of degree 2 and 0.
struct DeformationGenerator {
  Expr f, g;
};

/// Numeric homogeneity defect max over t in {2,3} of the two scaling laws;
/// checked by kodaira_deform before integrating.
double homogeneity_defect(const DeformationGenerator& gen, uint64_t seed = 12345);

struct DeformedFamily {
  Jet psi;  // jet on (m0, m1, m2, l) at (m, 0)
  Jet pi0, pi1;
};

/// Integrates d psi/d eps = f, d pi0/d eps = g pi0, d pi1/d eps = g pi1 with a
/// classical fourth-order one-step method, carrying full (m, lambda)-jets.
/// pi0/pi1 is preserved along the flow, so the affine chart survives any g.
DeformedFamily kodaira_deform(const CurveFamily& start, const DeformationGenerator& gen,
                              double eps_target, int steps, const Vec3& m, int order = 5);

/// Scalar variant at a single (m, lambda) sample.
double kodaira_deform_value(const CurveFamily& start, const DeformationGenerator& gen,
                            double eps_target, int steps, const Vec3& m, double lambda);

struct PipelineCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct HeisenbergReport {
  double lambda4 = 0.0;
  std::string w_text;
  std::vector<PipelineCheck> checks;

  bool all_pass() const;
};

/// End-to-end certification of the Heisenberg example: the closed-form
/// solution w = y e^{ax} + z e^{bx}, the kernel directions of d psi at
/// lambda = 0, 1, infinity and lambda4, the Moebius match between the two
/// curve parametrisations, the Heisenberg algebra and Killing properties, and
/// the pencil invariance.
HeisenbergReport heisenberg_pipeline(double eps, double a, double b, uint64_t seed = 2024);

}  // namespace veroweb
