#include "veroweb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace veroweb {

size_t GridField::node_count() const {
  size_t n = 1;
  for (const GridAxis& ax : axes) n *= ax.count;
  return n;
}

size_t GridField::flat(int i, int j, int k) const {
  if (dim() == 2) return static_cast<size_t>(i) * axes[1].count + j;
  return (static_cast<size_t>(i) * axes[1].count + j) * axes[2].count + k;
}

Chart GridField::chart() const {
  Chart c;
  for (const GridAxis& ax : axes) c.names.push_back(ax.name);
  return c;
}

GridField GridField::zeros(std::vector<GridAxis> axes) {
  GridField g;
  g.axes = std::move(axes);
  if (g.dim() != 2 && g.dim() != 3) throw std::invalid_argument("GridField: dim must be 2 or 3");
  for (const GridAxis& ax : g.axes)
    if (ax.spacing <= 0.0 || ax.count < 1) throw std::invalid_argument("GridField: bad axis");
  g.values.assign(g.node_count(), 0.0);
  return g;
}

GridField GridField::sample(const Expr& e, std::vector<GridAxis> axes, const Bindings& params) {
  GridField g = zeros(std::move(axes));
  const Program prog = Program::compile(e, g.chart(), params);
  std::vector<double> p(g.dim());
  if (g.dim() == 2) {
    for (int i = 0; i < g.axes[0].count; ++i) {
      p[0] = g.axes[0].coord(i);
      for (int j = 0; j < g.axes[1].count; ++j) {
        p[1] = g.axes[1].coord(j);
        g.at(i, j) = prog.eval(p);
      }
    }
  } else {
    for (int i = 0; i < g.axes[0].count; ++i) {
      p[0] = g.axes[0].coord(i);
      for (int j = 0; j < g.axes[1].count; ++j) {
        p[1] = g.axes[1].coord(j);
        for (int k = 0; k < g.axes[2].count; ++k) {
          p[2] = g.axes[2].coord(k);
          g.at(i, j, k) = prog.eval(p);
        }
      }
    }
  }
  return g;
}

namespace {

// Applies a 1D stencil along `axis` to every grid line.
template <typename LineOp>
GridField apply_along_axis(const GridField& g, int axis, LineOp op) {
  GridField out = g;
  const int n = g.axes[axis].count;
  std::vector<double> line(n), dline(n);

  size_t stride = 1;
  for (int d = g.dim() - 1; d > axis; --d) stride *= g.axes[d].count;
  size_t lines = g.node_count() / n;

  for (size_t l = 0; l < lines; ++l) {
    // decompose line index into the base offset skipping `axis`
    size_t rem = l, base = 0;
    for (int d = g.dim() - 1; d >= 0; --d) {
      if (d == axis) continue;
      size_t extent = g.axes[d].count;
      size_t idx = rem % extent;
      rem /= extent;
      size_t dstride = 1;
      for (int dd = g.dim() - 1; dd > d; --dd) dstride *= g.axes[dd].count;
      base += idx * dstride;
    }
    for (int i = 0; i < n; ++i) line[i] = g.values[base + i * stride];
    op(line, dline);
    for (int i = 0; i < n; ++i) out.values[base + i * stride] = dline[i];
  }
  return out;
}

void d1_line(const std::vector<double>& v, std::vector<double>& d, double h, bool periodic) {
  const int n = static_cast<int>(v.size());
  const double inv2h = 1.0 / (2.0 * h);
  for (int i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) * inv2h;
  if (periodic) {
    d[0] = (v[1] - v[n - 1]) * inv2h;
    d[n - 1] = (v[0] - v[n - 2]) * inv2h;
  } else {
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2h;
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) * inv2h;
  }
}

void d2_line(const std::vector<double>& v, std::vector<double>& d, double h, bool periodic) {
  const int n = static_cast<int>(v.size());
  const double invh2 = 1.0 / (h * h);
  for (int i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * invh2;
  if (periodic) {
    d[0] = (v[1] - 2.0 * v[0] + v[n - 1]) * invh2;
    d[n - 1] = (v[0] - 2.0 * v[n - 1] + v[n - 2]) * invh2;
  } else {
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) * invh2;
    d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) * invh2;
  }
}

}  // namespace

GridField fd_derivative(const GridField& g, const MultiIndex& alpha) {
  if (static_cast<int>(alpha.size()) != g.dim())
    throw std::invalid_argument("fd_derivative: alpha dimension mismatch");
  if (multi_index_order(alpha) > 2)
    throw std::invalid_argument("fd_derivative: |alpha| must be <= 2");
  GridField out = g;
  for (int axis = 0; axis < g.dim(); ++axis) {
    if (alpha[axis] == 0) continue;
    if (g.axes[axis].count < 5)
      throw std::invalid_argument("fd_derivative: need >= 5 nodes along differentiated axis");
    const double h = g.axes[axis].spacing;
    const bool periodic = g.axes[axis].periodic;
    if (alpha[axis] == 1) {
      out = apply_along_axis(out, axis, [&](const std::vector<double>& v, std::vector<double>& d) {
        d1_line(v, d, h, periodic);
      });
    } else if (alpha[axis] == 2) {
      out = apply_along_axis(out, axis, [&](const std::vector<double>& v, std::vector<double>& d) {
        d2_line(v, d, h, periodic);
      });
    } else {
      throw std::invalid_argument("fd_derivative: per-axis order must be <= 2");
    }
  }
  return out;
}

GridNorms interior_norms(const GridField& g) {
  GridNorms n;
  size_t counted = 0;
  const auto in_range = [&](int idx, int axis) {
    if (g.axes[axis].periodic) return true;
    return idx >= 2 && idx < g.axes[axis].count - 2;
  };
  for (int i = 0; i < g.axes[0].count; ++i) {
    if (!in_range(i, 0)) continue;
    for (int j = 0; j < g.axes[1].count; ++j) {
      if (!in_range(j, 1)) continue;
      if (g.dim() == 2) {
        const double v = g.at(i, j);
        n.max_abs = std::max(n.max_abs, std::abs(v));
        n.l2 += v * v;
        ++counted;
      } else {
        for (int k = 0; k < g.axes[2].count; ++k) {
          if (!in_range(k, 2)) continue;
          const double v = g.at(i, j, k);
          n.max_abs = std::max(n.max_abs, std::abs(v));
          n.l2 += v * v;
          ++counted;
        }
      }
    }
  }
  if (counted) n.l2 = std::sqrt(n.l2 / counted);
  return n;
}

void save_csv(const GridField& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  if (g.dim() == 2) {
    os << "axis0,axis1,value\n";
    for (int i = 0; i < g.axes[0].count; ++i)
      for (int j = 0; j < g.axes[1].count; ++j)
        os << g.axes[0].coord(i) << "," << g.axes[1].coord(j) << "," << g.at(i, j) << "\n";
  } else {
    os << "axis0,axis1,axis2,value\n";
    for (int i = 0; i < g.axes[0].count; ++i)
      for (int j = 0; j < g.axes[1].count; ++j)
        for (int k = 0; k < g.axes[2].count; ++k)
          os << g.axes[0].coord(i) << "," << g.axes[1].coord(j) << "," << g.axes[2].coord(k)
             << "," << g.at(i, j, k) << "\n";
  }
}

GridField load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::string header;
  std::getline(is, header);
  int dim = 0;
  if (header.rfind("axis0,axis1,axis2", 0) == 0) {
    dim = 3;
  } else if (header.rfind("axis0,axis1", 0) == 0) {
    dim = 2;
  } else {
    throw std::runtime_error("unrecognized grid CSV header: " + header);
  }

  std::vector<std::vector<double>> coords(dim);
  std::vector<double> values;
  std::string row;
  while (std::getline(is, row)) {
    if (row.empty()) continue;
    std::istringstream ss(row);
    std::string cell;
    for (int d = 0; d < dim; ++d) {
      std::getline(ss, cell, ',');
      coords[d].push_back(std::stod(cell));
    }
    std::getline(ss, cell, ',');
    values.push_back(std::stod(cell));
  }

  GridField g;
  for (int d = 0; d < dim; ++d) {
    // distinct sorted coordinates define the axis
    std::vector<double> uniq = coords[d];
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    GridAxis ax;
    ax.name = "axis" + std::to_string(d);
    ax.origin = uniq.front();
    ax.count = static_cast<int>(uniq.size());
    ax.spacing = ax.count > 1 ? (uniq.back() - uniq.front()) / (ax.count - 1) : 1.0;
    g.axes.push_back(ax);
  }
  if (values.size() != g.node_count())
    throw std::runtime_error("grid CSV: node count mismatch");
  g.values = std::move(values);  // writer emits row-major in axis order
  return g;
}

}  // namespace veroweb
