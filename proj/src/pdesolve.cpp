#include "veroweb/pdesolve.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "veroweb/parser.hpp"

namespace veroweb {

namespace {

// periodic central stencils on flat (X slowest) arrays
struct Stencils {
  int nx, nt;
  double hx, ht;

  size_t at(int i, int j) const { return static_cast<size_t>(i) * nt + j; }
  int xp(int i) const { return i + 1 < nx ? i + 1 : 0; }
  int xm(int i) const { return i > 0 ? i - 1 : nx - 1; }
  int tp(int j) const { return j + 1 < nt ? j + 1 : 0; }
  int tm(int j) const { return j > 0 ? j - 1 : nt - 1; }

  void dx(const std::vector<double>& v, std::vector<double>& out) const {
    const double c = 1.0 / (2.0 * hx);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j) out[at(i, j)] = (v[at(xp(i), j)] - v[at(xm(i), j)]) * c;
  }
  void dxx(const std::vector<double>& v, std::vector<double>& out) const {
    const double c = 1.0 / (hx * hx);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j)
        out[at(i, j)] = (v[at(xp(i), j)] - 2.0 * v[at(i, j)] + v[at(xm(i), j)]) * c;
  }
  void dxt(const std::vector<double>& v, std::vector<double>& out) const {
    const double c = 1.0 / (4.0 * hx * ht);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j)
        out[at(i, j)] = (v[at(xp(i), tp(j))] - v[at(xp(i), tm(j))] - v[at(xm(i), tp(j))] +
                         v[at(xm(i), tm(j))]) *
                        c;
  }
};

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

std::string SolveReport::to_json() const {
  nlohmann::ordered_json j;
  j["steps_taken"] = steps_taken;
  j["max_residual"] = max_residual;
  j["blow_up"] = blow_up;
  j["wall_time_s"] = wall_time_s;
  return j.dump();
}

EvolveResult hypercr_evolve(const EvolutionState& init, double y_final, int steps,
                            const std::optional<Expr>& forcing, const Bindings& params) {
  if (steps < 1) throw std::invalid_argument("hypercr_evolve: steps must be >= 1");
  if (!init.X.periodic || !init.T.periodic)
    throw std::invalid_argument("hypercr_evolve: X and T axes must be periodic");
  const auto t0 = std::chrono::steady_clock::now();

  const int nx = init.X.count, nt = init.T.count;
  const Stencils st{nx, nt, init.X.spacing, init.T.spacing};
  const size_t n = init.nodes();

  std::optional<Program> fprog;
  const Chart fchart{{"X", "T", "Y"}};
  if (forcing) fprog = Program::compile(*forcing, fchart, params);

  // the stored volume's Y axis always ascends; backward runs fill it from the top
  const double dy = y_final / steps;
  const bool forward = dy >= 0.0;
  GridAxis yax{"Y", std::min(0.0, y_final), std::abs(dy), steps + 1, false};
  const auto slice_of = [&](int s) { return forward ? s : steps - s; };
  EvolveResult res;
  res.volume = GridField::zeros({init.X, init.T, yax});

  std::vector<double> H = init.H, G = init.G;
  std::vector<double> lastH = H, lastG = G;
  const auto store_slice = [&](int s, const std::vector<double>& Hs) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j) res.volume.at(i, j, slice_of(s)) = Hs[st.at(i, j)];
  };
  store_slice(0, H);

  // scratch buffers for the G-equation right side
  std::vector<double> hx(n), hxx(n), hxt(n), gx(n);
  const auto g_rhs = [&](const std::vector<double>& Hs, const std::vector<double>& Gs, double y,
                         std::vector<double>& out) {
    st.dx(Hs, hx);
    st.dxx(Hs, hxx);
    st.dxt(Hs, hxt);
    st.dx(Gs, gx);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j) {
        const size_t q = st.at(i, j);
        double f = 0.0;
        if (fprog) {
          const double c[3] = {init.X.coord(i), init.T.coord(j), y};
          f = fprog->eval(c);
        }
        out[q] = hxt[q] + Gs[q] * hxx[q] - hx[q] * gx[q] + f;
      }
  };

  std::vector<double> k1(n), k2(n), k3(n), k4(n), Ht(n), Gt(n);
  int taken = 0;
  bool blew = false;
  for (int s = 0; s < steps; ++s) {
    const double y = s * dy;
    // k1
    g_rhs(H, G, y, k1);
    // k2 at y + dy/2 with (H + dy/2 G, G + dy/2 k1)
    for (size_t q = 0; q < n; ++q) {
      Ht[q] = H[q] + 0.5 * dy * G[q];
      Gt[q] = G[q] + 0.5 * dy * k1[q];
    }
    g_rhs(Ht, Gt, y + 0.5 * dy, k2);
    // k3
    for (size_t q = 0; q < n; ++q) {
      Ht[q] = H[q] + 0.5 * dy * (G[q] + 0.5 * dy * k1[q]);
      Gt[q] = G[q] + 0.5 * dy * k2[q];
    }
    g_rhs(Ht, Gt, y + 0.5 * dy, k3);
    // k4
    for (size_t q = 0; q < n; ++q) {
      Ht[q] = H[q] + dy * (G[q] + 0.5 * dy * k2[q]);
      Gt[q] = G[q] + dy * k3[q];
    }
    g_rhs(Ht, Gt, y + dy, k4);
    // combined update: dH/dY = G goes through the same stages
    for (size_t q = 0; q < n; ++q) {
      const double gs1 = G[q];
      const double gs2 = G[q] + 0.5 * dy * k1[q];
      const double gs3 = G[q] + 0.5 * dy * k2[q];
      const double gs4 = G[q] + dy * k3[q];
      H[q] += dy / 6.0 * (gs1 + 2 * gs2 + 2 * gs3 + gs4);
      G[q] += dy / 6.0 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
    }
    ++taken;
    if (!all_finite(H) || !all_finite(G)) {
      blew = true;
      break;
    }
    store_slice(taken, H);
    lastH = H;
    lastG = G;
  }

  res.final_state = EvolutionState{init.X, init.T, std::move(lastH), std::move(lastG)};
  res.report.steps_taken = taken;
  res.report.blow_up = blew;
  if (blew) {
    // keep only the finite slices; they are contiguous on the ascending axis
    const int lo = forward ? 0 : steps - taken + 1;
    GridAxis ytrunc{"Y", yax.coord(lo), yax.spacing, taken, false};
    GridField trunc = GridField::zeros({init.X, init.T, ytrunc});
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j)
        for (int k = 0; k < taken; ++k) trunc.at(i, j, k) = res.volume.at(i, j, lo + k);
    res.volume = std::move(trunc);
  }

  // diagnostics: discrete residual of the forced equation on the volume
  if (!blew && steps >= 4) {
    ResidualGridResult rg = residual_grid(ResidualKind::HyperCR, res.volume);
    if (fprog) {
      GridNorms norms;
      size_t counted = 0;
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j)
          for (int k = 2; k + 2 < res.volume.axes[2].count; ++k) {
            const double c[3] = {init.X.coord(i), init.T.coord(j), yax.coord(k)};
            const double v = rg.residual.at(i, j, k) + fprog->eval(c);
            norms.max_abs = std::max(norms.max_abs, std::abs(v));
            norms.l2 += v * v;
            ++counted;
          }
      if (counted) norms.l2 = std::sqrt(norms.l2 / counted);
      res.report.max_residual = norms.max_abs;
    } else {
      res.report.max_residual = rg.norms.max_abs;
    }
  }

  res.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

namespace {

MultiIndex axis_alpha(int dim, int a, int b = -1) {
  MultiIndex m(dim, 0);
  m[a] += 1;
  if (b >= 0) m[b] += 1;
  return m;
}

}  // namespace

ResidualGridResult residual_grid(ResidualKind kind, const GridField& field,
                                 const ResidualParams& params) {
  const int dim = field.dim();
  if (dim != 3) throw std::invalid_argument("residual_grid: need a 3-axis field");
  ResidualGridResult out;
  out.residual = field;

  const auto axis_of = [&](const std::string& name) {
    for (int i = 0; i < dim; ++i)
      if (field.axes[i].name == name) return i;
    throw std::invalid_argument("residual_grid: missing axis " + name);
  };

  if (kind == ResidualKind::Hirota || kind == ResidualKind::Hierarchy) {
    // (b-a) w_x w_yz + a w_y w_zx - b w_z w_xy with (x,y,z) -> (x, x_i, x_j)
    const int ax = kind == ResidualKind::Hirota ? axis_of("x") : 0;
    const int ay = kind == ResidualKind::Hirota ? axis_of("y") : 1;
    const int az = kind == ResidualKind::Hirota ? axis_of("z") : 2;
    const double a = kind == ResidualKind::Hirota ? params.a : params.ai;
    const double b = kind == ResidualKind::Hirota ? params.b : params.aj;
    const GridField wx = fd_derivative(field, axis_alpha(dim, ax));
    const GridField wy = fd_derivative(field, axis_alpha(dim, ay));
    const GridField wz = fd_derivative(field, axis_alpha(dim, az));
    const GridField wyz = fd_derivative(field, axis_alpha(dim, ay, az));
    const GridField wzx = fd_derivative(field, axis_alpha(dim, az, ax));
    const GridField wxy = fd_derivative(field, axis_alpha(dim, ax, ay));
    if (kind == ResidualKind::Hirota) {
      for (size_t q = 0; q < field.values.size(); ++q)
        out.residual.values[q] = (b - a) * wx.values[q] * wyz.values[q] +
                                 a * wy.values[q] * wzx.values[q] -
                                 b * wz.values[q] * wxy.values[q];
    } else {
      // (a_i - a_j) w_x w_ij + a_j w_i w_jx - a_i w_j w_ix
      for (size_t q = 0; q < field.values.size(); ++q)
        out.residual.values[q] = (a - b) * wx.values[q] * wyz.values[q] +
                                 b * wy.values[q] * wzx.values[q] -
                                 a * wz.values[q] * wxy.values[q];
    }
  } else {
    const int aX = axis_of("X"), aY = axis_of("Y"), aT = axis_of("T");
    const GridField HX = fd_derivative(field, axis_alpha(dim, aX));
    const GridField HY = fd_derivative(field, axis_alpha(dim, aY));
    const GridField HXT = fd_derivative(field, axis_alpha(dim, aX, aT));
    const GridField HYY = fd_derivative(field, axis_alpha(dim, aY, aY));
    const GridField HXX = fd_derivative(field, axis_alpha(dim, aX, aX));
    const GridField HXY = fd_derivative(field, axis_alpha(dim, aX, aY));
    for (size_t q = 0; q < field.values.size(); ++q)
      out.residual.values[q] = HXT.values[q] - HYY.values[q] +
                               HY.values[q] * HXX.values[q] - HX.values[q] * HXY.values[q];
  }

  out.norms = interior_norms(out.residual);
  return out;
}

ConvergenceResult convergence_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 3)
    throw std::invalid_argument("convergence_order: need >= 3 matching refinements");
  ConvergenceResult r;
  r.h = h;
  r.err = err;
  r.exact = true;
  for (double e : err)
    if (e >= 1e-12) r.exact = false;
  if (r.exact) return r;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return r;
}

SolverConfig SolverConfig::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SolverConfig c;
  c.nx = j.value("nx", c.nx);
  c.nt = j.value("nt", c.nt);
  c.Lx = j.value("Lx", c.Lx);
  c.Lt = j.value("Lt", c.Lt);
  c.y_final = j.value("y_final", c.y_final);
  c.steps = j.value("steps", c.steps);
  c.init_H = j.value("init_H", c.init_H);
  c.init_G = j.value("init_G", c.init_G);
  if (j.contains("forcing") && !j.at("forcing").is_null())
    c.forcing = j.at("forcing").get<std::string>();
  return c;
}

EvolutionState SolverConfig::initial_state(const Bindings& params) const {
  EvolutionState st;
  st.X = GridAxis{"X", -Lx / 2, Lx / nx, nx, true};
  st.T = GridAxis{"T", -Lt / 2, Lt / nt, nt, true};
  st.H.resize(st.nodes());
  st.G.resize(st.nodes());
  const Chart c{{"X", "T"}};
  const Program ph = Program::compile(parse_expr(init_H), c, params);
  const Program pg = Program::compile(parse_expr(init_G), c, params);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nt; ++j) {
      const double q[2] = {st.X.coord(i), st.T.coord(j)};
      st.H[st.flat(i, j)] = ph.eval(q);
      st.G[st.flat(i, j)] = pg.eval(q);
    }
  return st;
}

ConvergenceResult solver_convergence(const SolverConfig& base, const Expr& exact,
                                     const std::vector<int>& scales, const Bindings& params) {
  if (scales.size() < 3) throw std::invalid_argument("solver_convergence: need >= 3 refinements");
  std::vector<double> hs, errs;
  const Chart cXYT = Chart::XYT();
  std::optional<Expr> forcing;
  if (base.forcing) forcing = parse_expr(*base.forcing);
  for (int s : scales) {
    SolverConfig c = base;
    c.nx = base.nx * s;
    c.nt = base.nt * s;
    c.steps = base.steps * s;
    const EvolutionState init = c.initial_state(params);
    const EvolveResult r = hypercr_evolve(init, c.y_final, c.steps, forcing, params);
    if (r.report.blow_up) throw std::runtime_error("solver_convergence: blow-up during a run");
    double err = 0.0;
    const Program pe = Program::compile(exact, cXYT, params);
    for (int i = 0; i < c.nx; ++i)
      for (int j = 0; j < c.nt; ++j) {
        const double q[3] = {init.X.coord(i), c.y_final, init.T.coord(j)};
        err = std::max(err, std::abs(r.volume.at(i, j, c.steps) - pe.eval(q)));
      }
    hs.push_back(init.X.spacing);
    errs.push_back(err);
  }
  return convergence_order(hs, errs);
}

}  // namespace veroweb
