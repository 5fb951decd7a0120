#pragma once

#include <string>

namespace veroweb {

/// Sign and normalization choices the formulas leave open. Every report embeds
/// the digest of this block so numbers stay interpretable after the fact.
/// The full prose description lives in docs/conventions.md.
struct Conventions {
  /// Orientation used by the Hodge star in the symmetry reduction,
  /// dx^dy^dz^dtau = +1 up to this single empirical bit.
  static constexpr int orientation = +1;

  /// Map between the Lax spectral parameter and the Veronese curve parameter.
  static constexpr const char* mobius_map = "mu = -1/lambda";

  /// Pencil combination.
  static constexpr const char* pencil_sign = "P(lambda) = P0 + lambda*P1";

  /// Jacobiator is the coordinate form of the cyclic bracket sum
  /// {x^a,{x^b,x^c}} + {x^c,{x^a,x^b}} + {x^b,{x^c,x^a}}.
  static constexpr const char* jacobiator = "cyclic-bracket";

  /// Hamiltonian vector field X_f^a = P^{ab} d_b f; for base Hamiltonians the
  /// fibre rates are (-L0 f, -L1 f).
  static constexpr const char* hamiltonian_field = "Xf = P(., df)";

  /// Bivector Lie derivative satisfies L_V(A^B) = [V,A]^B + A^[V,B]; with it
  /// the Heisenberg generator gives L_RX P^lambda = -eps*lambda*P0.
  static constexpr int heisenberg_sign = -1;

  /// Trace-free Einstein-Weyl residual: E = tf(Ric + (1/4)(D_i w_j + D_j w_i)
  /// + (1/4) w_i w_j), trace removed against h.
  static constexpr const char* ew_residual = "quarter-symmetrized";
};

/// FNV-1a hash of the convention block, hex-encoded.
std::string conventions_digest();

}  // namespace veroweb
