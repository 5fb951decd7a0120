#include "veroweb/poisson.hpp"

#include <cmath>

#include "veroweb/conventions.hpp"

namespace veroweb {

Bivector5 Bivector5::zero(const Chart& chart5) {
  Bivector5 B;
  B.chart5 = chart5;
  for (auto& row : B.m)
    for (Expr& e : row) e = Expr::constant(0.0);
  return B;
}

std::array<std::array<double, 5>, 5> Bivector5::at(std::span<const double> p,
                                                   const Bindings& params) const {
  std::array<std::array<double, 5>, 5> v{};
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      v[a][b] = m[a][b].empty() ? 0.0 : eval_jet(m[a][b], chart5, p, 0, params).value();
  return v;
}

Bivector5 operator+(const Bivector5& A, const Bivector5& B) {
  Bivector5 R = A;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) R.m[a][b] = A.m[a][b] + B.m[a][b];
  return R;
}

Bivector5 scale(const Bivector5& A, double c) {
  Bivector5 R = A;
  for (auto& row : R.m)
    for (Expr& e : row) e = Expr::constant(c) * e;
  return R;
}

Bivector5 PoissonPencil::at_lambda(double lambda) const {
  return P0 + scale(P1, lambda);
}

PoissonPencil pencil_from_lax(const LambdaVectorField& L0, const LambdaVectorField& L1) {
  if (L0.degree() > 1 || L1.degree() > 1)
    throw std::invalid_argument("pencil_from_lax: Lax fields must be linear in lambda");
  if (L0.chart.names != L1.chart.names)
    throw std::invalid_argument("pencil_from_lax: chart mismatch");
  const Chart chart5 = Chart::with_fibre(L0.chart);

  PoissonPencil P{Bivector5::zero(chart5), Bivector5::zero(chart5)};
  // A ^ B with (A^B)^{ab} = A^a B^b - A^b B^a; d_p0 is slot 3, d_p1 slot 4.
  const auto add_wedge = [](Bivector5& B, const std::array<Expr, 3>& A, int fibre) {
    for (int i = 0; i < 3; ++i) {
      B.m[i][fibre] = B.m[i][fibre] + A[i];
      B.m[fibre][i] = B.m[fibre][i] - A[i];
    }
  };
  add_wedge(P.P0, L0.coeffs[0], 3);
  add_wedge(P.P0, L1.coeffs[0], 4);
  if (L0.degree() >= 1) add_wedge(P.P1, L0.coeffs[1], 3);
  if (L1.degree() >= 1) add_wedge(P.P1, L1.coeffs[1], 4);
  return P;
}

const std::array<std::array<int, 3>, 10> Jacobiator5::combos = {{{0, 1, 2},
                                                                 {0, 1, 3},
                                                                 {0, 1, 4},
                                                                 {0, 2, 3},
                                                                 {0, 2, 4},
                                                                 {0, 3, 4},
                                                                 {1, 2, 3},
                                                                 {1, 2, 4},
                                                                 {1, 3, 4},
                                                                 {2, 3, 4}}};

double Jacobiator5::max_abs() const {
  double m = 0.0;
  for (double v : comp) m = std::max(m, std::abs(v));
  return m;
}

double Jacobiator5::at(int a, int b, int c) const {
  int idx[3] = {a, b, c};
  int perm_sign = 1;
  for (int x = 0; x < 3; ++x)
    for (int y = x + 1; y < 3; ++y) {
      if (idx[x] == idx[y]) return 0.0;
      if (idx[x] > idx[y]) {
        std::swap(idx[x], idx[y]);
        perm_sign = -perm_sign;
      }
    }
  for (size_t i = 0; i < combos.size(); ++i)
    if (idx[0] == combos[i][0] && idx[1] == combos[i][1] && idx[2] == combos[i][2])
      return perm_sign * comp[i];
  return 0.0;
}

namespace {

struct BivectorValues {
  double P[5][5];
  double dP[5][5][5];  // dP[d][a][b] = d_d P^{ab}
};

BivectorValues bivector_jets(const Bivector5& B, std::span<const double> p,
                             const Bindings& params) {
  BivectorValues v{};
  const int dim = B.chart5.dim();
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      if (B.m[a][b].empty()) continue;
      const Jet j = eval_jet(B.m[a][b], B.chart5, p, 1, params);
      v.P[a][b] = j.value();
      for (int d = 0; d < dim; ++d) {
        MultiIndex al(dim, 0);
        al[d] = 1;
        v.dP[d][a][b] = j.derivative(al);
      }
    }
  return v;
}

Jacobiator5 jacobiator_values(const BivectorValues& v) {
  Jacobiator5 J;
  for (size_t i = 0; i < Jacobiator5::combos.size(); ++i) {
    const int a = Jacobiator5::combos[i][0], b = Jacobiator5::combos[i][1],
              c = Jacobiator5::combos[i][2];
    double s = 0.0;
    for (int d = 0; d < 5; ++d)
      s += v.P[a][d] * v.dP[d][b][c] + v.P[b][d] * v.dP[d][c][a] + v.P[c][d] * v.dP[d][a][b];
    J.comp[i] = s;
  }
  return J;
}

}  // namespace

Jacobiator5 jacobiator(const Bivector5& P, std::span<const double> p, const Bindings& params) {
  return jacobiator_values(bivector_jets(P, p, params));
}

Jacobiator5 jacobiator(const PoissonPencil& P, std::span<const double> p, double lambda,
                       const Bindings& params) {
  BivectorValues v0 = bivector_jets(P.P0, p, params);
  const BivectorValues v1 = bivector_jets(P.P1, p, params);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      v0.P[a][b] += lambda * v1.P[a][b];
      for (int d = 0; d < 5; ++d) v0.dP[d][a][b] += lambda * v1.dP[d][a][b];
    }
  return jacobiator_values(v0);
}

std::array<double, 5> casimir_apply(const PoissonPencil& P, const Expr& C,
                                    std::span<const double> p, double lambda,
                                    const Bindings& params) {
  const Chart& c5 = P.P0.chart5;
  const Chart base{{c5.names[0], c5.names[1], c5.names[2]}};
  const Jet jc = eval_jet(C, base, p.subspan(0, 3), 1, params);
  double dC[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    MultiIndex a(3, 0);
    a[i] = 1;
    dC[i] = jc.derivative(a);
  }
  const auto v0 = P.P0.at(p, params), v1 = P.P1.at(p, params);
  std::array<double, 5> out{};
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) out[a] += (v0[a][b] + lambda * v1[a][b]) * dC[b];
  return out;
}

namespace {

// e_mu = sum eps_{a b c d mu} P^{ab} Q^{cd}, the unit-coefficient volume form.
std::array<Expr, 5> contract_volume(const Bivector5& P, const Bivector5& Q) {
  std::array<Expr, 5> e;
  for (int mu = 0; mu < 5; ++mu) {
    Expr s = Expr::constant(0.0);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        if (P.m[a][b].empty()) continue;
        for (int c = 0; c < 5; ++c)
          for (int d = 0; d < 5; ++d) {
            if (Q.m[c][d].empty()) continue;
            const int sign = levi_civita5(a, b, c, d, mu);
            if (sign == 0) continue;
            s = s + Expr::constant(sign) * P.m[a][b] * Q.m[c][d];
          }
      }
    e[mu] = s;
  }
  return e;
}

}  // namespace

EFormTriple eform(const PoissonPencil& P) {
  // e(lambda) at lambda = 0, 1, -1, then the Vandermonde solve
  const Bivector5 Pm1 = P.at_lambda(-1.0), Pp1 = P.at_lambda(1.0);
  const std::array<Expr, 5> e0 = contract_volume(P.P0, P.P0);
  const std::array<Expr, 5> ep = contract_volume(Pp1, Pp1);
  const std::array<Expr, 5> em = contract_volume(Pm1, Pm1);

  EFormTriple ef;
  ef.chart5 = P.P0.chart5;
  for (int mu = 0; mu < 5; ++mu) {
    ef.e3[mu] = e0[mu];
    ef.e2[mu] = (ep[mu] - em[mu]) / 2.0;
    ef.e1[mu] = (ep[mu] + em[mu]) / 2.0 - e0[mu];
  }
  return ef;
}

std::array<double, 5> eform_at(const EFormTriple& ef, double lambda, std::span<const double> p,
                               const Bindings& params) {
  std::array<double, 5> out{};
  for (int mu = 0; mu < 5; ++mu) {
    const double v3 = ef.e3[mu].empty() ? 0.0 : eval_jet(ef.e3[mu], ef.chart5, p, 0, params).value();
    const double v2 = ef.e2[mu].empty() ? 0.0 : eval_jet(ef.e2[mu], ef.chart5, p, 0, params).value();
    const double v1 = ef.e1[mu].empty() ? 0.0 : eval_jet(ef.e1[mu], ef.chart5, p, 0, params).value();
    out[mu] = v3 + lambda * v2 + lambda * lambda * v1;
  }
  return out;
}

double eform_frobenius(const EFormTriple& ef, std::span<const double> p, double lambda,
                       const Bindings& params) {
  // values and first derivatives of each e^i component
  double e[5], de[5][5];
  for (int mu = 0; mu < 5; ++mu) {
    e[mu] = 0.0;
    for (int d = 0; d < 5; ++d) de[d][mu] = 0.0;
  }
  const double lpow[3] = {1.0, lambda, lambda * lambda};
  const std::array<Expr, 5>* parts[3] = {&ef.e3, &ef.e2, &ef.e1};
  for (int k = 0; k < 3; ++k)
    for (int mu = 0; mu < 5; ++mu) {
      const Expr& comp = (*parts[k])[mu];
      if (comp.empty()) continue;
      const Jet j = eval_jet(comp, ef.chart5, p, 1, params);
      e[mu] += lpow[k] * j.value();
      for (int d = 0; d < 5; ++d) {
        MultiIndex al(5, 0);
        al[d] = 1;
        de[d][mu] += lpow[k] * j.derivative(al);
      }
    }
  double frob = 0.0;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b)
      for (int c = b + 1; c < 5; ++c) {
        const double dab = de[a][b] - de[b][a];
        const double dbc = de[b][c] - de[c][b];
        const double dca = de[c][a] - de[a][c];
        const double v = e[a] * dbc + e[b] * dca + e[c] * dab;
        frob += v * v;
      }
  return std::sqrt(frob);
}

Mat3T<Expr> conformal_from_eforms(const EFormTriple& ef) {
  Mat3T<Expr> h;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      h[i][j] = ef.e2[i] * ef.e2[j] - 2.0 * (ef.e1[i] * ef.e3[j] + ef.e3[i] * ef.e1[j]);
  return h;
}

FlowResult hamiltonian_flow(const PoissonPencil& P, const Expr& f, std::span<const double> p,
                            double lambda, double t, const Bindings& params) {
  const auto rates = casimir_apply(P, f, p, lambda, params);
  FlowResult r;
  r.rates = rates;
  for (int a = 0; a < 5; ++a) r.endpoint[a] = p[a] + t * rates[a];
  return r;
}

Bivector5 bivector_lie(const Bivector5& P, const std::array<Expr, 5>& V) {
  const Chart& c5 = P.chart5;
  Bivector5 L = Bivector5::zero(c5);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      Expr s = Expr::constant(0.0);
      for (int d = 0; d < 5; ++d) {
        s = s + V[d] * diff(P.m[a][b], c5.names[d]);
        s = s - P.m[d][b] * diff(V[a], c5.names[d]);
        s = s - P.m[a][d] * diff(V[b], c5.names[d]);
      }
      L.m[a][b] = s;
    }
  return L;
}

HeisenbergInvariance heisenberg_invariance(double eps, std::span<const double> p, double lambda) {
  if (eps == 0.0) throw std::invalid_argument("heisenberg_invariance: eps must be nonzero");
  const Expr H = Expr::constant(eps / 2.0) * pow_int(Expr::symbol("X"), 2);
  auto [L0, L1] = hypercr_lax(H);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const Chart& c5 = P.P0.chart5;

  const Expr zero = Expr::constant(0.0), one = Expr::constant(1.0);
  const std::array<Expr, 5> RX = {one, Expr::constant(-eps) * Expr::symbol("T"), zero, zero, zero};
  const std::array<Expr, 5> RY = {zero, one, zero, zero, zero};
  const std::array<Expr, 5> RT = {zero, zero, one, zero, zero};
  (void)c5;

  const auto norm_at = [&](const Bivector5& B) {
    const auto v = B.at(p);
    double s = 0.0;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) s = std::max(s, std::abs(v[a][b]));
    return s;
  };

  HeisenbergInvariance rep;
  rep.sign = Conventions::heisenberg_sign;
  const Bivector5 LX0 = bivector_lie(P.P0, RX);
  const Bivector5 LX1 = bivector_lie(P.P1, RX);
  rep.lie_RX_P0 = norm_at(LX0);
  // L_RX P1 should equal sign * eps * P0
  rep.lie_RX_P1_plus_eps = norm_at(LX1 + scale(P.P0, -rep.sign * eps));
  const Bivector5 LY = bivector_lie(P.P0 + scale(P.P1, lambda), RY);
  const Bivector5 LT = bivector_lie(P.P0 + scale(P.P1, lambda), RT);
  rep.lie_RY = norm_at(LY);
  rep.lie_RT = norm_at(LT);
  return rep;
}

}  // namespace veroweb
