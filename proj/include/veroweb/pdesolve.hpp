#pragma once

#include <optional>
#include <string>
#include <vector>

#include "veroweb/grid.hpp"

namespace veroweb {

/// Cauchy data for the evolution in Y: H and G = H_Y on a periodic (X, T)
/// grid centered at the origin.
struct EvolutionState {
  GridAxis X, T;                 // both periodic
  std::vector<double> H, G;      // row-major, X slowest

  size_t nodes() const { return static_cast<size_t>(X.count) * T.count; }
  size_t flat(int i, int j) const { return static_cast<size_t>(i) * T.count + j; }
};

struct SolveReport {
  int steps_taken = 0;
  double max_residual = 0.0;  // forced-equation residual on the solved volume
  bool blow_up = false;
  double wall_time_s = 0.0;

  std::string to_json() const;
};

struct EvolveResult {
  GridField volume;            // axes (X, T, Y)
  EvolutionState final_state;  // last finite (H, G) pair, restartable
  SolveReport report;
};

/// Method of lines for H_YY = H_XT + H_Y H_XX - H_X H_XY + forcing:
/// order-2 central stencils in (X, T), classical fourth-order one-step method
/// in Y on (H, G). Non-finite values stop the run and set the blow-up flag.
EvolveResult hypercr_evolve(const EvolutionState& init, double y_final, int steps,
                            const std::optional<Expr>& forcing = std::nullopt,
                            const Bindings& params = {});

enum class ResidualKind { Hirota, HyperCR, Hierarchy };

struct ResidualParams {
  double a = 1.0, b = 2.0;    // Hirota constants
  double ai = 1.0, aj = 2.0;  // hierarchy pair constants
};

struct ResidualGridResult {
  GridField residual;
  GridNorms norms;  // over the interior
};

/// Pointwise equation residual of a sampled field:
///  - Hirota: axes named (x, y, z);
///  - HyperCR: axes named X, Y, T in any order;
///  - Hierarchy: axes (x, x_i, x_j) in that order, constants from params.
ResidualGridResult residual_grid(ResidualKind kind, const GridField& field,
                                 const ResidualParams& params = {});

/// Least-squares slope of log(err) against log(h). `exact` is set when every
/// error sits at rounding level and the slope is meaningless.
struct ConvergenceResult {
  std::vector<double> h, err;
  double slope = 0.0;
  bool exact = false;
};

ConvergenceResult convergence_order(const std::vector<double>& h, const std::vector<double>& err);

/// Solver configuration, JSON-serializable per the documented schema:
/// { nx, nt, Lx, Lt, y_final, steps, init_H, init_G, forcing }.
struct SolverConfig {
  int nx = 32, nt = 32;
  double Lx = 6.283185307179586, Lt = 6.283185307179586;
  double y_final = 0.2;
  int steps = 32;
  std::string init_H = "0", init_G = "0";
  std::optional<std::string> forcing;

  static SolverConfig from_json(const std::string& text);
  EvolutionState initial_state(const Bindings& params = {}) const;
};

/// Runs the configured solver against a manufactured/exact solution expression
/// in (X, Y, T) at dyadic refinements of (nx, nt, steps); errors are max-norm
/// over the final slice.
ConvergenceResult solver_convergence(const SolverConfig& base, const Expr& exact,
                                     const std::vector<int>& scales,
                                     const Bindings& params = {});

}  // namespace veroweb
