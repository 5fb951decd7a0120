#pragma once

#include <array>

#include "veroweb/expr.hpp"
#include "veroweb/laxweb.hpp"

namespace veroweb {

/// Antisymmetric bivector on (base^3, p0, p1); entries built from Lax pairs
/// never depend on the fibre coordinates.
struct Bivector5 {
  Chart chart5;
  std::array<std::array<Expr, 5>, 5> m;

  static Bivector5 zero(const Chart& chart5);
  std::array<std::array<double, 5>, 5> at(std::span<const double> p,
                                          const Bindings& params = {}) const;
};

Bivector5 operator+(const Bivector5& A, const Bivector5& B);
Bivector5 scale(const Bivector5& A, double c);

/// P(lambda) = P0 + lambda P1.
struct PoissonPencil {
  Bivector5 P0, P1;

  Bivector5 at_lambda(double lambda) const;
};

/// P^lambda = L0 ^ d_p0 + L1 ^ d_p1 for Lax fields linear in lambda;
/// the lambda^0 parts populate P0, the lambda^1 parts P1.
PoissonPencil pencil_from_lax(const LambdaVectorField& L0, const LambdaVectorField& L1);

/// The ten independent components of the cyclic bracket sum
/// J^{abc} = sum_d P^{ad} d_d P^{bc} + P^{bd} d_d P^{ca} + P^{cd} d_d P^{ab},
/// evaluated at (p, lambda). Vanishing of all components at every point is the
/// Jacobi identity.
struct Jacobiator5 {
  static const std::array<std::array<int, 3>, 10> combos;
  std::array<double, 10> comp{};

  double max_abs() const;
  /// Signed component for an arbitrary index triple.
  double at(int a, int b, int c) const;
};

Jacobiator5 jacobiator(const PoissonPencil& P, std::span<const double> p, double lambda,
                       const Bindings& params = {});
Jacobiator5 jacobiator(const Bivector5& P, std::span<const double> p,
                       const Bindings& params = {});

/// P^lambda(dC, .) for a fibre-independent C; zero iff C is a Casimir at p,
/// equivalently L0(C) = L1(C) = 0.
std::array<double, 5> casimir_apply(const PoissonPencil& P, const Expr& C,
                                    std::span<const double> p, double lambda,
                                    const Bindings& params = {});

/// e(lambda) = (P^lambda ^ P^lambda) hook Omega with the unit coordinate
/// 5-form; decomposed as e(lambda) = e3 + lambda e2 + lambda^2 e1 by a
/// Vandermonde solve at lambda = 0, 1, -1.
struct EFormTriple {
  Chart chart5;
  std::array<Expr, 5> e1, e2, e3;
};

EFormTriple eform(const PoissonPencil& P);

std::array<double, 5> eform_at(const EFormTriple& ef, double lambda, std::span<const double> p,
                               const Bindings& params = {});

/// Frobenius obstruction ||e ^ de|| (Frobenius norm over index triples) at
/// (p, lambda).
double eform_frobenius(const EFormTriple& ef, std::span<const double> p, double lambda,
                       const Bindings& params = {});

/// h = e2 (x) e2 - 2 (e1 (x) e3 + e3 (x) e1), restricted to the base block.
Mat3T<Expr> conformal_from_eforms(const EFormTriple& ef);

struct FlowResult {
  std::array<double, 5> rates;  // base entries vanish for base Hamiltonians
  std::array<double, 5> endpoint;
};

/// Flow of X_f = P^lambda(., df) from p for time t; fibre-affine, base
/// coordinates stationary.
FlowResult hamiltonian_flow(const PoissonPencil& P, const Expr& f, std::span<const double> p,
                            double lambda, double t, const Bindings& params = {});

/// Lie derivative of a bivector along V (components on the 5-chart):
/// (L_V P)^{ab} = V^d d_d P^{ab} - P^{db} d_d V^a - P^{ad} d_d V^b.
Bivector5 bivector_lie(const Bivector5& P, const std::array<Expr, 5>& V);

struct HeisenbergInvariance {
  double lie_RX_P0 = 0.0;          // || L_RX P0 ||, expected 0
  double lie_RX_P1_plus_eps = 0.0; // || L_RX P1 - sign*eps*P0 ||, expected 0
  double lie_RY = 0.0;             // || L_RY P(lambda) ||
  double lie_RT = 0.0;             // || L_RT P(lambda) ||
  int sign = 0;                    // the one global sign: L_RX P^l = sign*eps*l*P0
};

/// Invariance of the Heisenberg pencil under the right-invariant generators:
/// L_RX P^lambda = sign * eps * lambda * P0, L_RY = L_RT = 0.
HeisenbergInvariance heisenberg_invariance(double eps, std::span<const double> p,
                                           double lambda);

}  // namespace veroweb
