#include "veroweb/geometry.hpp"

#include <cmath>
#include <sstream>

#include "veroweb/conventions.hpp"

namespace veroweb {

double CurvatureReport::e_norm() const {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += E[i][j] * E[i][j];
  return std::sqrt(s);
}

std::string CurvatureReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"point\":[" << point[0] << "," << point[1] << "," << point[2] << "],\"chart\":[";
  for (int i = 0; i < 3; ++i) os << (i ? "," : "") << "\"" << chart.names[i] << "\"";
  os << "],\"gamma\":[";
  bool first = true;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        os << (first ? "" : ",") << gamma[k][i][j];
        first = false;
      }
  os << "],\"ricci\":[";
  first = true;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      os << (first ? "" : ",") << ricci[i][j];
      first = false;
    }
  os << "],\"scalar\":" << scalar << ",\"E\":[";
  first = true;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      os << (first ? "" : ",") << E[i][j];
      first = false;
    }
  os << "]}";
  return os.str();
}

WeylStructure hirota_weyl(const Expr& w, double a, double b) {
  if (a == b || a == 0.0 || b == 0.0)
    throw std::invalid_argument("hirota_weyl: need a != b, both nonzero");
  const Expr wx = diff(w, "x"), wy = diff(w, "y"), wz = diff(w, "z");
  const Expr wxx = diff(wx, "x"), wyy = diff(wy, "y"), wzz = diff(wz, "z");
  const double d = a - b, d2 = d * d;

  WeylStructure W;
  W.chart = Chart::xyz();
  W.h[0][0] = wx / (wy * wz);
  W.h[1][1] = (a * a) * wy / (d2 * wx * wz);
  W.h[2][2] = (b * b) * wz / (d2 * wx * wy);
  W.h[0][1] = a / (d * wz);
  W.h[0][2] = -(b / (d * wy));
  W.h[1][2] = (a * b) / (d2 * wx);
  W.h[1][0] = W.h[0][1];
  W.h[2][0] = W.h[0][2];
  W.h[2][1] = W.h[1][2];
  W.omega[0] = -(wxx / wx);
  W.omega[1] = -(wyy / wy);
  W.omega[2] = -(wzz / wz);
  return W;
}

WeylStructure hypercr_weyl(const Expr& H) {
  const Expr HX = diff(H, "X"), HY = diff(H, "Y");
  const Expr HXX = diff(HX, "X"), HXY = diff(HX, "Y");

  WeylStructure W;
  W.chart = Chart::XYT();
  // (dY + H_X dT)^2 - 4 (dX - H_Y dT) dT on (X, Y, T)
  W.h[0][0] = Expr::constant(0.0);
  W.h[1][1] = Expr::constant(1.0);
  W.h[2][2] = pow_int(HX, 2) + 4.0 * HY;
  W.h[0][1] = Expr::constant(0.0);
  W.h[0][2] = Expr::constant(-2.0);
  W.h[1][2] = HX;
  W.h[1][0] = W.h[0][1];
  W.h[2][0] = W.h[0][2];
  W.h[2][1] = W.h[1][2];
  W.omega[0] = Expr::constant(0.0);
  W.omega[1] = HXX;
  W.omega[2] = HX * HXX + 2.0 * HXY;
  return W;
}

CurvatureReport curvature(const WeylStructure& W, std::span<const double> p,
                          const Bindings& params) {
  CurvatureReport rep;
  rep.chart = W.chart;
  for (int i = 0; i < 3; ++i) rep.point[i] = p[i];

  // h to second derivatives, omega to first.
  double h[3][3], dh[3][3][3], ddh[3][3][3][3];
  double om[3], dom[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const Jet jh = eval_jet(W.h[i][j], W.chart, p, 2, params);
      h[i][j] = h[j][i] = jh.value();
      for (int k = 0; k < 3; ++k) {
        MultiIndex a(3, 0);
        a[k] = 1;
        dh[k][i][j] = dh[k][j][i] = jh.derivative(a);
        for (int l = k; l < 3; ++l) {
          MultiIndex b(3, 0);
          b[k] += 1;
          b[l] += 1;
          const double v = jh.derivative(b);
          ddh[k][l][i][j] = ddh[k][l][j][i] = v;
          ddh[l][k][i][j] = ddh[l][k][j][i] = v;
        }
      }
    }
    const Jet jo = eval_jet(W.omega[i], W.chart, p, 1, params);
    om[i] = jo.value();
    for (int k = 0; k < 3; ++k) {
      MultiIndex a(3, 0);
      a[k] = 1;
      dom[k][i] = jo.derivative(a);
    }
  }

  Mat3 hm;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) hm[i][j] = h[i][j];
  const double det = det3(hm);
  if (std::abs(det) < 1e-12) throw DegenerateInputError("curvature: singular metric at point");
  const Mat3 hinv = inv3(hm, det);

  // d(h^-1) = -h^-1 dh h^-1
  double dhinv[3][3][3];
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) s += hinv[i][a] * dh[m][a][b] * hinv[b][j];
        dhinv[m][i][j] = -s;
      }

  double gamma[3][3][3];
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) s += hinv[k][l] * (dh[i][l][j] + dh[j][l][i] - dh[l][i][j]);
        gamma[k][i][j] = 0.5 * s;
        rep.gamma[k][i][j] = gamma[k][i][j];
      }

  // d_m Gamma^k_ij
  double dgamma[3][3][3][3];
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double s = 0.0;
          for (int l = 0; l < 3; ++l) {
            s += dhinv[m][k][l] * (dh[i][l][j] + dh[j][l][i] - dh[l][i][j]);
            s += hinv[k][l] * (ddh[m][i][l][j] + ddh[m][j][l][i] - ddh[m][l][i][j]);
          }
          dgamma[m][k][i][j] = 0.5 * s;
        }

  // R_jk = d_i Gamma^i_jk - d_j Gamma^i_ik + Gamma^i_im Gamma^m_jk - Gamma^i_jm Gamma^m_ik
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        s += dgamma[i][i][j][k] - dgamma[j][i][i][k];
        for (int m = 0; m < 3; ++m)
          s += gamma[i][i][m] * gamma[m][j][k] - gamma[i][j][m] * gamma[m][i][k];
      }
      rep.ricci[j][k] = s;
    }

  rep.scalar = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) rep.scalar += hinv[j][k] * rep.ricci[j][k];

  // nabla_i w_j = d_i w_j - Gamma^k_ij w_k
  double nw[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = dom[i][j];
      for (int k = 0; k < 3; ++k) s -= gamma[k][i][j] * om[k];
      nw[i][j] = s;
    }

  Mat3 S;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      S[i][j] = rep.ricci[i][j] + 0.25 * (nw[i][j] + nw[j][i]) + 0.25 * om[i] * om[j];
  double trS = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) trS += hinv[i][j] * S[i][j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rep.E[i][j] = S[i][j] - (trS / 3.0) * h[i][j];

  return rep;
}

WeylStructure conformal_rescale(const WeylStructure& W, const Expr& phi) {
  WeylStructure R;
  R.chart = W.chart;
  const Expr phi2 = pow_int(phi, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) R.h[i][j] = phi2 * W.h[i][j];
  for (int i = 0; i < 3; ++i)
    R.omega[i] = W.omega[i] + 2.0 * diff(phi, W.chart.names[i]) / phi;
  return R;
}

void require_positive(const Expr& phi, const Chart& chart, std::span<const double> p,
                      const Bindings& params) {
  const double v = eval_scalar(phi, chart, p, params);
  if (!(v > 1e-12)) throw DegenerateInputError("conformal factor not positive at point");
}

// Order-0 jets rather than plain arithmetic: the jet division guard is what
// surfaces degenerate gradients (w_x -> 0, null |K|^2) as errors.
Mat3 weyl_metric_at(const WeylStructure& W, std::span<const double> p, const Bindings& params) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = eval_jet(W.h[i][j], W.chart, p, 0, params).value();
  return m;
}

Vec3 weyl_oneform_at(const WeylStructure& W, std::span<const double> p, const Bindings& params) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = eval_jet(W.omega[i], W.chart, p, 0, params).value();
  return v;
}

Mat3 lie_derivative_metric(const Chart& chart, const Mat3T<Expr>& h,
                           const std::array<Expr, 3>& V, std::span<const double> p,
                           const Bindings& params) {
  double hv[3][3], dh[3][3][3], v[3], dv[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Jet jh = eval_jet(h[i][j], chart, p, 1, params);
      hv[i][j] = jh.value();
      for (int k = 0; k < 3; ++k) {
        MultiIndex a(3, 0);
        a[k] = 1;
        dh[k][i][j] = jh.derivative(a);
      }
    }
    const Jet jv = eval_jet(V[i], chart, p, 1, params);
    v[i] = jv.value();
    for (int k = 0; k < 3; ++k) {
      MultiIndex a(3, 0);
      a[k] = 1;
      dv[k][i] = jv.derivative(a);
    }
  }
  Mat3 L;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        s += v[k] * dh[k][i][j] + hv[k][j] * dv[i][k] + hv[i][k] * dv[j][k];
      L[i][j] = s;
    }
  return L;
}

KillingExtension hirota_extension(const Expr& w, double a, double b) {
  if (a == b || a == 0.0 || b == 0.0)
    throw std::invalid_argument("hirota_extension: need a != b, both nonzero");
  const Expr wx = diff(w, "x"), wy = diff(w, "y"), wz = diff(w, "z");
  const Expr zero = Expr::constant(0.0), one = Expr::constant(1.0);

  KillingExtension ext;
  ext.chart4 = Chart{{"x", "y", "z", "tau"}};
  // L0' = W1 - lambda W2, L1' = W3 - lambda W4
  ext.W[0] = {-(wz / wx), zero, one, one};                  // d_z - (w_z/w_x) d_x + d_tau
  ext.W[1] = {zero, zero, Expr::constant(-a), zero};        // -a d_z
  ext.W[2] = {-(wy / wx), one, zero, zero};                 // d_y - (w_y/w_x) d_x
  ext.W[3] = {zero, Expr::constant(-b), zero, zero};        // -b d_y
  return ext;
}

double killing_norm2_at(const KillingExtension& ext, std::span<const double> p,
                        const Bindings& params) {
  // |K|^2 = g(K,K) = g_tt; build g^{-1} numerically and invert at p.
  Mat4 ginv;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      double w1 = eval_scalar(ext.W[0][mu], ext.chart4, p, params);
      double w4 = eval_scalar(ext.W[3][nu], ext.chart4, p, params);
      double w1n = eval_scalar(ext.W[0][nu], ext.chart4, p, params);
      double w4m = eval_scalar(ext.W[3][mu], ext.chart4, p, params);
      double w2 = eval_scalar(ext.W[1][mu], ext.chart4, p, params);
      double w3 = eval_scalar(ext.W[2][nu], ext.chart4, p, params);
      double w2n = eval_scalar(ext.W[1][nu], ext.chart4, p, params);
      double w3m = eval_scalar(ext.W[2][mu], ext.chart4, p, params);
      ginv[mu][nu] = 0.5 * (w1 * w4 + w1n * w4m) - 0.5 * (w2 * w3 + w2n * w3m);
    }
  const double det = det4(ginv);
  if (std::abs(det) < 1e-14) throw DegenerateInputError("killing_norm2: non-invertible metric");
  const Mat4 adj = adjugate4(ginv);
  return adj[3][3] / det;
}

WeylStructure jones_tod_reduce(const KillingExtension& ext) {
  const Chart& c4 = ext.chart4;

  Mat4T<Expr> ginv;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      ginv[mu][nu] = 0.5 * (ext.W[0][mu] * ext.W[3][nu] + ext.W[0][nu] * ext.W[3][mu]) -
                     0.5 * (ext.W[1][mu] * ext.W[2][nu] + ext.W[1][nu] * ext.W[2][mu]);

  const Expr detginv = det4(ginv);
  const Mat4T<Expr> adj = adjugate4(ginv);
  Mat4T<Expr> g;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) g[mu][nu] = adj[mu][nu] / detginv;

  // K = d/dtau, so the covariant K is the tau column of g.
  std::array<Expr, 4> K;
  for (int mu = 0; mu < 4; ++mu) K[mu] = g[mu][3];
  const Expr K2 = g[3][3];

  // dK_{mu nu} = d_mu K_nu - d_nu K_mu
  Mat4T<Expr> dK;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      dK[mu][nu] = diff(K[nu], c4.names[mu]) - diff(K[mu], c4.names[nu]);

  // (K ^ dK)_{mu nu rho} on the four ascending triples, cyclic convention.
  Expr Acomb[4][4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c)
        Acomb[a][b][c] = K[a] * dK[b][c] + K[b] * dK[c][a] + K[c] * dK[a][b];

  // A^{nu rho sg} = sum over ascending (a,b,c) and their permutations of
  // sign * g^{nu a'} g^{rho b'} g^{sg c'} A_{abc}.
  const auto raise3 = [&](int nu, int rho, int sg) {
    Expr s = Expr::constant(0.0);
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        for (int c = b + 1; c < 4; ++c) {
          const int perm[6][3] = {{a, b, c}, {b, c, a}, {c, a, b},
                                  {a, c, b}, {c, b, a}, {b, a, c}};
          Expr t = Expr::constant(0.0);
          for (int q = 0; q < 6; ++q) {
            const double sign = q < 3 ? 1.0 : -1.0;
            t = t + Expr::constant(sign) * ginv[nu][perm[q][0]] * ginv[rho][perm[q][1]] *
                        ginv[sg][perm[q][2]];
          }
          s = s + t * Acomb[a][b][c];
        }
    return s;
  };

  // Hodge dual: (*A)_mu = orient sqrt(det g) eps_{nu rho sg mu} A^{nu rho sg}
  // with (nu,rho,sg) the ascending complement of mu (the 3! permutations
  // collapse against the 1/3!). Neutral signature makes det g positive,
  // det g = 1/det(g^{-1}).
  const Expr sqrtdetg = 1.0 / sqrt(detginv);
  std::array<Expr, 4> star;
  for (int mu = 0; mu < 4; ++mu) {
    int tri[3], t = 0;
    for (int d = 0; d < 4; ++d)
      if (d != mu) tri[t++] = d;
    const int sign = levi_civita4(tri[0], tri[1], tri[2], mu);
    star[mu] = Expr::constant(Conventions::orientation * sign) * sqrtdetg *
               raise3(tri[0], tri[1], tri[2]);
  }

  // Representative normalization: the quotient metric from this formula is
  // scale-invariant in g, and with the 1/2-symmetrized product it comes out
  // as -1/4 of the Hirota-form representative. Fix the factor once so the
  // phi^2 = w_z/(w_x w_y) gauge lands exactly on that form.
  constexpr double kRepresentativeScale = -4.0;

  WeylStructure R;
  R.chart = Chart{{c4.names[0], c4.names[1], c4.names[2]}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      R.h[i][j] = kRepresentativeScale * (g[i][j] / K2 - (K[i] * K[j]) / pow_int(K2, 2));
    R.omega[i] = 2.0 * star[i] / K2;
  }
  return R;
}

}  // namespace veroweb
