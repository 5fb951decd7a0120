#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "veroweb/expr.hpp"

namespace veroweb {

struct GridAxis {
  std::string name;
  double origin = 0.0;
  double spacing = 1.0;
  int count = 0;
  bool periodic = false;

  double coord(int i) const { return origin + spacing * i; }
};

/// Uniform-grid sampled scalar field on 2 or 3 axes, row-major with the first
/// axis slowest. Immutable in spirit: operations return new grids.
struct GridField {
  std::vector<GridAxis> axes;
  std::vector<double> values;

  int dim() const { return static_cast<int>(axes.size()); }
  size_t node_count() const;
  size_t flat(int i, int j, int k = 0) const;
  double& at(int i, int j, int k = 0) { return values[flat(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return values[flat(i, j, k)]; }

  Chart chart() const;

  static GridField zeros(std::vector<GridAxis> axes);
  /// Sample an expression; symbol names resolve against the axis names.
  static GridField sample(const Expr& e, std::vector<GridAxis> axes, const Bindings& params = {});
};

/// Order-2 central differences in the interior; periodic axes wrap, otherwise
/// one-sided second-order stencils at the edges. |alpha| <= 2.
GridField fd_derivative(const GridField& g, const MultiIndex& alpha);

struct GridNorms {
  double max_abs = 0.0;
  double l2 = 0.0;  // root mean square over counted nodes
};

/// Norms over the interior: periodic axes count every node, non-periodic axes
/// drop a 2-node margin.
GridNorms interior_norms(const GridField& g);

void save_csv(const GridField& g, const std::string& path);
GridField load_csv(const std::string& path);

}  // namespace veroweb
