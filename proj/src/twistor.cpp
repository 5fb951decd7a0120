#include "veroweb/twistor.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "veroweb/conventions.hpp"
#include "veroweb/geometry.hpp"
#include "veroweb/laxweb.hpp"
#include "veroweb/parser.hpp"
#include "veroweb/poisson.hpp"

namespace veroweb {

namespace {

// 10-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGLNode[10] = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
    -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
    0.8650633666889845,  0.9739065285171717};
constexpr double kGLWeight[10] = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
    0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
    0.1494513491505806, 0.0666713443086881};

// Composite quadrature of a vector-valued integrand over [0, b].
template <typename F>
void integrate_line(double b, int min_panels, F&& accumulate) {
  if (b == 0.0) return;
  const int panels = std::max(min_panels, static_cast<int>(std::ceil(std::abs(b))));
  const double w = b / panels;
  for (int q = 0; q < panels; ++q) {
    const double mid = (q + 0.5) * w;
    for (int n = 0; n < 10; ++n) {
      const double s = mid + 0.5 * w * kGLNode[n];
      accumulate(s, 0.5 * w * kGLWeight[n]);
    }
  }
}

const Chart& chartXYT() {
  static const Chart c = Chart::XYT();
  return c;
}

}  // namespace

TwistorSeries::TwistorSeries(Expr H, Bindings params, double consistency_tol)
    : H_(std::move(H)), params_(std::move(params)), consistency_tol_(consistency_tol),
      max_index_(2) {}

Jet TwistorSeries::d_for_x(int i, std::span<const double> p, int order) const {
  // D1 only reads coefficients of psi_i shifted by e_X or e_Y, so the
  // pure-T slots (and their quadrature) can be skipped.
  const Jet a = psi_jet_impl(i, p, order + 1, false);
  const Jet hj = eval_jet(H_, chartXYT(), p, order + 1, params_);
  return jet_partial(a, 1) + jet_partial(hj, 0) * jet_partial(a, 0);
}

Jet TwistorSeries::d_for_y(int i, std::span<const double> p, int order) const {
  const Jet a = psi_jet_impl(i, p, order + 1, true);
  const Jet hj = eval_jet(H_, chartXYT(), p, order + 1, params_);
  return jet_partial(a, 2) + jet_partial(hj, 1) * jet_partial(a, 0);
}

Jet TwistorSeries::psi_jet(int i, std::span<const double> p, int order) const {
  return psi_jet_impl(i, p, order, true);
}

Jet TwistorSeries::psi_jet_impl(int i, std::span<const double> p, int order,
                                bool with_pure_T) const {
  if (i < 0 || i > max_index_)
    throw std::invalid_argument("psi_jet: index not materialized; call extend first");
  const JetSpace& space = JetSpace::get(3, order);
  if (i <= 2) {
    const int axis[3] = {2, 1, 0};  // T, Y, X on chart (X, Y, T)
    return Jet::coordinate(space, p, axis[i]);
  }

  std::vector<double> coeffs(space.size(), 0.0);

  // coefficients with an X or Y derivative come from the defining relations
  const Jet dx = order >= 1 ? d_for_x(i - 1, p, order - 1)
                            : Jet::constant(JetSpace::get(3, 0), p, 0.0);
  const Jet dy = order >= 1 ? d_for_y(i - 1, p, order - 1)
                            : Jet::constant(JetSpace::get(3, 0), p, 0.0);
  for (int r2 = 0; r2 < space.size(); ++r2) {
    const MultiIndex& alpha = space.index_at(r2);
    if (alpha[0] >= 1) {
      MultiIndex beta = alpha;
      beta[0] -= 1;
      coeffs[r2] = dx.coeffs()[dx.space().rank_of(beta)] / alpha[0];
    } else if (alpha[1] >= 1) {
      MultiIndex beta = alpha;
      beta[1] -= 1;
      coeffs[r2] = dy.coeffs()[dy.space().rank_of(beta)] / alpha[1];
    }
  }

  // value and pure-T coefficients by quadrature along (0,0,T) -> (X,0,T) -> (X,Y,T)
  if (with_pure_T) {
    std::vector<double> pureT(order + 1, 0.0);
    const double X = p[0], Y = p[1], T = p[2];
    integrate_line(X, 1, [&](double s, double wgt) {
      const double q[3] = {s, 0.0, T};
      const Jet d = d_for_x(i - 1, q, order);
      for (int j = 0; j <= order; ++j) {
        MultiIndex a(3, 0);
        a[2] = j;
        pureT[j] += wgt * d.coeff(a);  // (1/j!) d_T^j integrand
      }
    });
    integrate_line(Y, 1, [&](double t, double wgt) {
      const double q[3] = {X, t, T};
      const Jet d = d_for_y(i - 1, q, order);
      for (int j = 0; j <= order; ++j) {
        MultiIndex a(3, 0);
        a[2] = j;
        pureT[j] += wgt * d.coeff(a);
      }
    });
    for (int j = 0; j <= order; ++j) {
      MultiIndex a(3, 0);
      a[2] = j;
      coeffs[space.rank_of(a)] = pureT[j];
    }
  }

  return Jet::from_coeffs(space, p, std::move(coeffs));
}

double TwistorSeries::psi_value(int i, std::span<const double> p) const {
  return psi_jet(i, p, 0).value();
}

double TwistorSeries::wave_residual(int i, std::span<const double> p) const {
  const Jet a = psi_jet(i, p, 2);
  const Jet hj = eval_jet(H_, chartXYT(), p, 1, params_);
  const double XT = a.derivative({1, 0, 1});
  const double YY = a.derivative({0, 2, 0});
  const double XX = a.derivative({2, 0, 0});
  const double XY = a.derivative({1, 1, 0});
  const double HX = hj.derivative({1, 0, 0});
  const double HY = hj.derivative({0, 1, 0});
  return XT - YY + HY * XX - HX * XY;
}

double TwistorSeries::consistency_residual(int i, std::span<const double> p) const {
  const Jet d2 = d_for_y(i, p, 1);
  const Jet d1 = d_for_x(i, p, 1);
  return d2.derivative({1, 0, 0}) - d1.derivative({0, 1, 0});
}

void TwistorSeries::extend(int upto) {
  while (max_index_ < upto) {
    // consistency of the step psi_max -> psi_{max+1} over a small sample box
    const double sample[5][3] = {{0.0, 0.0, 0.0},
                                 {0.4, -0.3, 0.2},
                                 {-0.5, 0.5, -0.1},
                                 {0.3, 0.2, 0.5},
                                 {-0.2, -0.4, -0.5}};
    for (const double* q : sample) {
      const double v = consistency_residual(max_index_, std::span<const double>(q, 3));
      if (std::abs(v) > consistency_tol_) {
        std::ostringstream os;
        os << "twistor recursion inconsistent at step " << max_index_ << " (defect " << v
           << "): the field does not satisfy the flow equation";
        throw RecursionConsistencyError(os.str());
      }
    }
    ++max_index_;
  }
}

CurveFamily curve_family_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  CurveFamily cf;
  cf.psi = parse_expr(j.at("psi").get<std::string>());
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) cf.params[k] = v.get<double>();
  return cf;
}

namespace {

const Chart& chart_family() {
  static const Chart c{{"m0", "m1", "m2", "l"}};
  return c;
}

}  // namespace

ExtractResult extract_coordinates(const Jet& psi_jet) {
  const JetSpace& s = psi_jet.space();
  if (s.dim() != 4 || s.order() < 5)
    throw std::invalid_argument("extract_coordinates: need a (m0,m1,m2,l) jet of order >= 5");
  if (psi_jet.point()[3] != 0.0)
    throw std::invalid_argument("extract_coordinates: jet must be based at lambda = 0");

  // m-jets of the lambda-coefficients psi_k, k = 0..3: slice alpha_l = k
  const auto slice = [&](int k, const MultiIndex& am) {
    MultiIndex a = {am[0], am[1], am[2], k};
    return psi_jet.coeffs()[s.rank_of(a)];
  };
  double u[3] = {};        // (T, Y, X)
  double J1[3][3] = {};    // du_p/dm_q
  double J2[3][3][3] = {}; // d2 u_p / dm_q dm_r
  double hval = 0, h1[3] = {}, h2[3][3] = {};
  for (int k = 0; k < 4; ++k) {
    const double v = slice(k, {0, 0, 0});
    double g[3], gg[3][3];
    for (int q = 0; q < 3; ++q) {
      MultiIndex a(3, 0);
      a[q] = 1;
      g[q] = slice(k, a);
      for (int r = 0; r < 3; ++r) {
        MultiIndex b(3, 0);
        b[q] += 1;
        b[r] += 1;
        // coefficient -> derivative: multiply by b!
        gg[q][r] = slice(k, b) * (q == r ? 2.0 : 1.0);
      }
    }
    if (k < 3) {
      u[k] = v;
      for (int q = 0; q < 3; ++q) J1[k][q] = g[q];
      for (int q = 0; q < 3; ++q)
        for (int r = 0; r < 3; ++r) J2[k][q][r] = gg[q][r];
    } else {
      hval = v;
      for (int q = 0; q < 3; ++q) h1[q] = g[q];
      for (int q = 0; q < 3; ++q)
        for (int r = 0; r < 3; ++r) h2[q][r] = gg[q][r];
    }
  }

  Mat3 J1m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) J1m[i][j] = J1[i][j];
  const double det = det3(J1m);
  if (std::abs(det) < 1e-10)
    throw DegenerateInputError("extract_coordinates: curve family not in general position");
  const Mat3 Jinv = inv3(J1m, det);

  ExtractResult res;
  res.T = u[0];
  res.Y = u[1];
  res.X = u[2];
  res.H = hval;

  for (int a = 0; a < 3; ++a) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) sum += h1[c] * Jinv[c][a];
    res.dH[a] = sum;
  }

  // inverse-map second derivatives: M^c_{ab} = -Jinv^c_p J2^p_{qr} Jinv^q_a Jinv^r_b
  double M[3][3][3];
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double sum = 0.0;
        for (int pp = 0; pp < 3; ++pp)
          for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
              sum += Jinv[c][pp] * J2[pp][q][r] * Jinv[q][a] * Jinv[r][b];
        M[c][a][b] = -sum;
      }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) sum += h2[c][d] * Jinv[c][a] * Jinv[d][b];
        sum += h1[c] * M[c][a][b];
      }
      res.d2H[a][b] = sum;
    }

  // (T, Y, X) ordering: H_XT = d2H[2][0], H_YY = [1][1], H_XX = [2][2], H_XY = [2][1]
  res.hypercr_residual = res.d2H[2][0] - res.d2H[1][1] + res.dH[1] * res.d2H[2][2] -
                         res.dH[2] * res.d2H[2][1];
  return res;
}

ExtractResult extract_coordinates(const CurveFamily& cf, const Vec3& m) {
  const double p[4] = {m[0], m[1], m[2], 0.0};
  return extract_coordinates(eval_jet(cf.psi, chart_family(), p, 5, cf.params));
}

double homogeneity_defect(const DeformationGenerator& gen, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.3, 1.2);
  const Chart c{{"psi", "pi0", "pi1"}};
  double defect = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const double base[3] = {u(rng), u(rng), u(rng)};
    for (double t : {2.0, 3.0}) {
      const double scaled[3] = {t * base[0], t * base[1], t * base[2]};
      if (!gen.f.empty()) {
        const double f0 = eval_scalar(gen.f, c, base);
        const double ft = eval_scalar(gen.f, c, scaled);
        defect = std::max(defect, std::abs(ft - t * t * f0) / std::max(1.0, std::abs(f0)));
      }
      if (!gen.g.empty()) {
        const double g0 = eval_scalar(gen.g, c, base);
        const double gt = eval_scalar(gen.g, c, scaled);
        defect = std::max(defect, std::abs(gt - g0) / std::max(1.0, std::abs(g0)));
      }
    }
  }
  return defect;
}

DeformedFamily kodaira_deform(const CurveFamily& start, const DeformationGenerator& gen,
                              double eps_target, int steps, const Vec3& m, int order) {
  if (steps < 1) throw std::invalid_argument("kodaira_deform: steps must be >= 1");
  const double defect = homogeneity_defect(gen);
  if (defect > 1e-10)
    throw std::invalid_argument("kodaira_deform: generator fails the homogeneity check (defect " +
                                std::to_string(defect) + ")");

  const Chart& c = chart_family();
  const JetSpace& space = JetSpace::get(4, order);
  const double p[4] = {m[0], m[1], m[2], 0.0};

  struct State {
    Jet psi, pi0, pi1;
  };
  State y{eval_jet(start.psi, c, p, order, start.params),
          Jet::coordinate(space, p, 3),
          Jet::constant(space, p, 1.0)};

  const bool has_f = !gen.f.empty();
  const bool has_g = !gen.g.empty();
  const auto rhs = [&](const State& s) {
    std::map<std::string, Jet> env{{"psi", s.psi}, {"pi0", s.pi0}, {"pi1", s.pi1}};
    const Jet zero = Jet::constant(space, p, 0.0);
    Jet fv = has_f ? eval_jet_env(gen.f, env) : zero;
    Jet gv = has_g ? eval_jet_env(gen.g, env) : zero;
    return State{fv, gv * s.pi0, gv * s.pi1};
  };

  const double h = eps_target / steps;
  for (int n = 0; n < steps; ++n) {
    const State k1 = rhs(y);
    const State y2{y.psi + k1.psi * (h / 2), y.pi0 + k1.pi0 * (h / 2), y.pi1 + k1.pi1 * (h / 2)};
    const State k2 = rhs(y2);
    const State y3{y.psi + k2.psi * (h / 2), y.pi0 + k2.pi0 * (h / 2), y.pi1 + k2.pi1 * (h / 2)};
    const State k3 = rhs(y3);
    const State y4{y.psi + k3.psi * h, y.pi0 + k3.pi0 * h, y.pi1 + k3.pi1 * h};
    const State k4 = rhs(y4);
    y = State{y.psi + (k1.psi + k2.psi * 2.0 + k3.psi * 2.0 + k4.psi) * (h / 6),
              y.pi0 + (k1.pi0 + k2.pi0 * 2.0 + k3.pi0 * 2.0 + k4.pi0) * (h / 6),
              y.pi1 + (k1.pi1 + k2.pi1 * 2.0 + k3.pi1 * 2.0 + k4.pi1) * (h / 6)};
    if (!y.psi.finite() || !y.pi0.finite() || !y.pi1.finite())
      throw std::runtime_error("kodaira_deform: non-finite values during integration");
  }
  return DeformedFamily{y.psi, y.pi0, y.pi1};
}

double kodaira_deform_value(const CurveFamily& start, const DeformationGenerator& gen,
                            double eps_target, int steps, const Vec3& m, double lambda) {
  const Chart& c = chart_family();
  const double p[4] = {m[0], m[1], m[2], lambda};
  double psi = eval_scalar(start.psi, c, p, start.params);
  double pi0 = lambda, pi1 = 1.0;
  const Chart cg{{"psi", "pi0", "pi1"}};
  const bool has_f = !gen.f.empty(), has_g = !gen.g.empty();
  const auto feval = [&](double ps, double q0, double q1) {
    const double q[3] = {ps, q0, q1};
    return has_f ? eval_scalar(gen.f, cg, q) : 0.0;
  };
  const auto geval = [&](double ps, double q0, double q1) {
    const double q[3] = {ps, q0, q1};
    return has_g ? eval_scalar(gen.g, cg, q) : 0.0;
  };
  const double h = eps_target / steps;
  for (int n = 0; n < steps; ++n) {
    const double f1 = feval(psi, pi0, pi1), g1 = geval(psi, pi0, pi1);
    const double f2 = feval(psi + h / 2 * f1, pi0 + h / 2 * g1 * pi0, pi1 + h / 2 * g1 * pi1);
    const double g2 = geval(psi + h / 2 * f1, pi0 + h / 2 * g1 * pi0, pi1 + h / 2 * g1 * pi1);
    const double f3 = feval(psi + h / 2 * f2, pi0 + h / 2 * g2 * pi0, pi1 + h / 2 * g2 * pi1);
    const double g3 = geval(psi + h / 2 * f2, pi0 + h / 2 * g2 * pi0, pi1 + h / 2 * g2 * pi1);
    const double f4 = feval(psi + h * f3, pi0 + h * g3 * pi0, pi1 + h * g3 * pi1);
    const double g4 = geval(psi + h * f3, pi0 + h * g3 * pi0, pi1 + h * g3 * pi1);
    const double dpsi = (f1 + 2 * f2 + 2 * f3 + f4) / 6;
    const double dp0 = (g1 * pi0 + 2 * g2 * (pi0 + h / 2 * g1 * pi0) + 2 * g3 * (pi0 + h / 2 * g2 * pi0) + g4 * (pi0 + h * g3 * pi0)) / 6;
    const double dp1 = (g1 * pi1 + 2 * g2 * (pi1 + h / 2 * g1 * pi1) + 2 * g3 * (pi1 + h / 2 * g2 * pi1) + g4 * (pi1 + h * g3 * pi1)) / 6;
    psi += h * dpsi;
    pi0 += h * dp0;
    pi1 += h * dp1;
    if (!std::isfinite(psi) || !std::isfinite(pi0) || !std::isfinite(pi1))
      throw std::runtime_error("kodaira_deform: non-finite values during integration");
  }
  return psi;
}

bool HeisenbergReport::all_pass() const {
  for (const PipelineCheck& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

double collinearity(const Vec3& u, const Vec3& v) {
  const Vec3 cxp = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0]};
  const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double nc = std::sqrt(cxp[0] * cxp[0] + cxp[1] * cxp[1] + cxp[2] * cxp[2]);
  return nc / (nu * nv);
}

}  // namespace

HeisenbergReport heisenberg_pipeline(double eps, double a, double b, uint64_t seed) {
  if (eps == 0.0 || a == 0.0 || a == b)
    throw std::invalid_argument("heisenberg_pipeline: need eps != 0, a != 0, a != b");

  HeisenbergReport rep;
  rep.lambda4 = 1.0 - b / a;
  const double l4 = rep.lambda4;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uX(0.05, 0.8 / std::max(1.0, std::abs(eps)));
  std::uniform_real_distribution<double> uYT(-0.5, 0.5);

  const auto push = [&](const std::string& name, double residual, double tol) {
    rep.checks.push_back({name, residual, tol, std::abs(residual) <= tol});
  };

  // (i) the recovered solution solves the Hirota equation
  const Bindings ab{{"a", a}, {"b", b}};
  Expr w = parse_expr("y*exp(a*x)+z*exp(b*x)");
  rep.w_text = "y*exp(" + std::to_string(a) + "*x)+z*exp(" + std::to_string(b) + "*x)";
  {
    double worst = 0.0;
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uyz(0.1, 1.0);
    for (int t = 0; t < 25; ++t) {
      const double p[3] = {ux(rng), uyz(rng), uyz(rng)};
      worst = std::max(worst, std::abs(hirota_residual(w, a, b, p, ab)));
    }
    push("hirota_residual_of_w", worst, 1e-12);
  }

  // (ii) kernel directions of d psi at lambda = 0, 1, infinity map to
  // span(dx), span(dz), span(dy) after x = T, y = X e^{-eps Y},
  // z = (1 - eps X) e^{-eps(T+Y)}
  const Chart& XYT = chartXYT();
  Expr psi = parse_expr("T+l*Y-(l/eps)*ln(1-l*eps*X)");
  const std::array<Expr, 3> dpsi = {diff(psi, "X"), diff(psi, "Y"), diff(psi, "T")};
  Expr xmap = parse_expr("T");
  Expr ymap = parse_expr("X*exp(-eps*Y)");
  Expr zmap = parse_expr("(1-eps*X)*exp(-eps*(T+Y))");
  const auto grad = [&](const Expr& e, const double* p, double lambda) {
    const Bindings binds{{"eps", eps}, {"l", lambda}};
    Vec3 g;
    for (int i = 0; i < 3; ++i)
      g[i] = eval_scalar(diff(e, XYT.names[i]), XYT, std::span<const double>(p, 3), binds);
    return g;
  };
  const auto dpsi_at = [&](const double* p, double lambda) {
    const Bindings binds{{"eps", eps}, {"l", lambda}};
    Vec3 g;
    for (int i = 0; i < 3; ++i)
      g[i] = eval_scalar(dpsi[i], XYT, std::span<const double>(p, 3), binds);
    return g;
  };
  {
    double worst0 = 0.0, worst1 = 0.0, worstInf = 0.0;
    for (int t = 0; t < 10; ++t) {
      const double p[3] = {uX(rng), uYT(rng), uYT(rng)};
      worst0 = std::max(worst0, collinearity(dpsi_at(p, 0.0), grad(xmap, p, 0.0)));
      worst1 = std::max(worst1, collinearity(dpsi_at(p, 1.0), grad(zmap, p, 1.0)));
      worstInf = std::max(worstInf, collinearity(dpsi_at(p, 1e8), grad(ymap, p, 1e8)));
    }
    push("kernel_direction_lambda_0_dx", worst0, 1e-10);
    push("kernel_direction_lambda_1_dz", worst1, 1e-10);
    push("kernel_direction_lambda_inf_dy", worstInf, 1e-6);
  }

  // lambda4 fibre: d psi there is collinear with dw for the pre-rescaling
  // w = (1 - eps lambda4 X) e^{-eps(T/lambda4 + Y)}
  {
    Expr wpre = parse_expr("(1-eps*l4*X)*exp(-eps*(T/l4+Y))");
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const double p[3] = {uX(rng), uYT(rng), uYT(rng)};
      const Bindings binds{{"eps", eps}, {"l4", l4}};
      Vec3 g;
      for (int i = 0; i < 3; ++i)
        g[i] = eval_scalar(diff(wpre, XYT.names[i]), XYT, std::span<const double>(p, 3), binds);
      worst = std::max(worst, collinearity(dpsi_at(p, l4), g));
    }
    push("kernel_direction_lambda4_dw", worst, 1e-10);
  }

  // (iii) ker(dw) equals the Lax plane at the conventions-file parameter
  // match: s(lambda) = lambda4 / (1 + b lambda) sends lambda = 0 to lambda4
  {
    auto [L0, L1] = hirota_lax(w, a, b);
    double worst = 0.0;
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uyz(0.1, 1.0);
    for (int t = 0; t < 10; ++t) {
      const double p[3] = {ux(rng), uyz(rng), uyz(rng)};
      const Jet jw = eval_jet(w, Chart::xyz(), p, 1, ab);
      const Vec3 dw = {jw.derivative({1, 0, 0}), jw.derivative({0, 1, 0}),
                       jw.derivative({0, 0, 1})};
      const Vec3 v0 = L0.eval(p, 0.0, ab), v1 = L1.eval(p, 0.0, ab);
      const double scale = std::abs(dw[0]) + std::abs(dw[1]) + std::abs(dw[2]);
      const double r = std::max(std::abs(dw[0] * v0[0] + dw[1] * v0[1] + dw[2] * v0[2]),
                                std::abs(dw[0] * v1[0] + dw[1] * v1[1] + dw[2] * v1[2]));
      worst = std::max(worst, r / scale);
    }
    push("ker_dw_is_lax_plane_at_lambda4", worst, 1e-12);
  }

  // Moebius consistency: the Zakharevich annihilator at s(lambda) is collinear
  // with the Lax-plane annihilator at lambda, for the final w
  {
    auto [L0, L1] = hirota_lax(w, a, b);
    double worst = 0.0;
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uyz(0.1, 1.0), ul(-0.4, 0.4);
    for (int t = 0; t < 10; ++t) {
      const double p[3] = {ux(rng), uyz(rng), uyz(rng)};
      const double lambda = ul(rng);
      const double s = l4 / (1.0 + b * lambda);
      const Jet jw = eval_jet(w, Chart::xyz(), p, 1, ab);
      const double wx = jw.derivative({1, 0, 0}), wy = jw.derivative({0, 1, 0}),
                   wz = jw.derivative({0, 0, 1});
      // annihilator of the Lax plane via the cross product
      const Vec3 v0 = L0.eval(p, lambda, ab), v1 = L1.eval(p, lambda, ab);
      const Vec3 thL = {v0[1] * v1[2] - v0[2] * v1[1], v0[2] * v1[0] - v0[0] * v1[2],
                        v0[0] * v1[1] - v0[1] * v1[0]};
      const Vec3 thZ = {-l4 * (s - 1.0) * wx, -s * (s - 1.0) * wy, (1.0 - l4) * s * wz};
      worst = std::max(worst, collinearity(thL, thZ));
    }
    push("moebius_parameter_match", worst, 1e-10);
  }

  // Heisenberg algebra: [R_X, R_T] = eps R_Y, [R_X, R_Y] = [R_T, R_Y] = 0
  {
    const Expr zero = Expr::constant(0.0), one = Expr::constant(1.0);
    const std::array<Expr, 3> RX = {one, Expr::constant(-eps) * Expr::symbol("T"), zero};
    const std::array<Expr, 3> RY = {zero, one, zero};
    const std::array<Expr, 3> RT = {zero, zero, one};
    const auto lie = [&](const std::array<Expr, 3>& A, const std::array<Expr, 3>& B) {
      std::array<Expr, 3> r;
      for (int k = 0; k < 3; ++k) {
        Expr s = Expr::constant(0.0);
        for (int m2 = 0; m2 < 3; ++m2)
          s = s + A[m2] * diff(B[k], XYT.names[m2]) - B[m2] * diff(A[k], XYT.names[m2]);
        r[k] = s;
      }
      return r;
    };
    double worst = 0.0;
    const auto check_field = [&](const std::array<Expr, 3>& F, const std::array<Expr, 3>& G) {
      for (int t = 0; t < 5; ++t) {
        const double p[3] = {uX(rng), uYT(rng), uYT(rng)};
        for (int i = 0; i < 3; ++i) {
          const double fv = F[i].empty() ? 0.0 : eval_scalar(F[i], XYT, std::span<const double>(p, 3));
          const double gv = G[i].empty() ? 0.0 : eval_scalar(G[i], XYT, std::span<const double>(p, 3));
          worst = std::max(worst, std::abs(fv - gv));
        }
      }
    };
    const std::array<Expr, 3> epsRY = {zero, Expr::constant(eps), zero};
    const std::array<Expr, 3> zeroF = {zero, zero, zero};
    check_field(lie(RX, RT), epsRY);
    check_field(lie(RX, RY), zeroF);
    check_field(lie(RT, RY), zeroF);
    push("heisenberg_commutators", worst, 1e-14);
  }

  // Killing vectors of the Nil metric; the twistor distribution itself is not
  // R_X-invariant
  {
    WeylStructure nil = hypercr_weyl(Expr::constant(eps / 2.0) * pow_int(Expr::symbol("X"), 2));
    const Expr zero = Expr::constant(0.0), one = Expr::constant(1.0);
    const std::array<Expr, 3> RX = {one, Expr::constant(-eps) * Expr::symbol("T"), zero};
    const std::array<Expr, 3> RY = {zero, one, zero};
    const std::array<Expr, 3> RT = {zero, zero, one};
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      const double p[3] = {uX(rng), uYT(rng), uYT(rng)};
      for (const auto& V : {RX, RY, RT}) {
        const Mat3 L = lie_derivative_metric(XYT, nil.h, V, std::span<const double>(p, 3));
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(L[i][j]));
      }
    }
    push("killing_vectors_of_h", worst, 1e-10);

    // [R_X, L1] leaves span(L0, L1) at generic (p, lambda)
    auto [L0, L1] = hypercr_lax(Expr::constant(eps / 2.0) * pow_int(Expr::symbol("X"), 2));
    const LambdaVectorField RXf{XYT, {RX}};
    const LambdaVectorField C = commutator(RXf, L1);
    int min_rank = 3;
    for (int t = 0; t < 5; ++t) {
      const double p[3] = {uX(rng), uYT(rng), uYT(rng)};
      const double lambda = 0.7 + 0.1 * t;
      min_rank = std::min(min_rank,
                          span_rank({L0.eval(p, lambda), L1.eval(p, lambda), C.eval(p, lambda)}));
    }
    push("twistor_distribution_not_RX_invariant", min_rank == 3 ? 0.0 : 1.0, 0.5);
  }

  // pencil invariance: L_RX P^lambda = sign eps lambda P0 to 1e-11
  {
    double worst = 0.0;
    for (double lambda : {0.0, 2.0, -1.0}) {
      const double p5[5] = {uX(rng), uYT(rng), uYT(rng), 0.3, -0.2};
      const HeisenbergInvariance inv = heisenberg_invariance(eps, p5, lambda);
      worst = std::max({worst, inv.lie_RX_P0, inv.lie_RX_P1_plus_eps, inv.lie_RY, inv.lie_RT});
    }
    push("pencil_invariance", worst, 1e-11);
  }

  return rep;
}

}  // namespace veroweb
