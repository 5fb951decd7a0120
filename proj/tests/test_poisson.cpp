#include <doctest.h>

#include <cmath>
#include <random>

#include "veroweb/geometry.hpp"
#include "veroweb/parser.hpp"
#include "veroweb/poisson.hpp"

using namespace veroweb;

namespace {

Expr random_poly3(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  Expr w = 3.0 * Expr::symbol("x");
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; i + j <= 3; ++j)
      for (int k = 0; i + j + k <= 3; ++k) {
        if (i + j + k == 0) continue;
        w = w + u(rng) * pow_int(Expr::symbol("x"), i) * pow_int(Expr::symbol("y"), j) *
                    pow_int(Expr::symbol("z"), k);
      }
  return w;
}

// independent contraction oracle: e_mu = sum eps_{abcd mu} P^{ab} P^{cd}
std::array<double, 5> contract_oracle(const std::array<std::array<double, 5>, 5>& P) {
  std::array<double, 5> e{};
  for (int mu = 0; mu < 5; ++mu)
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b)
        for (int c = 0; c < 5; ++c)
          for (int d = 0; d < 5; ++d) {
            const int s = levi_civita5(a, b, c, d, mu);
            if (s) e[mu] += s * P[a][b] * P[c][d];
          }
  return e;
}

double bracket(const Bivector5& B, const Expr& f, const Expr& g, std::span<const double> p) {
  const auto P = B.at(p);
  const Jet jf = eval_jet(f, B.chart5, p, 1);
  const Jet jg = eval_jet(g, B.chart5, p, 1);
  double df[5], dg[5];
  for (int i = 0; i < 5; ++i) {
    MultiIndex a(5, 0);
    a[i] = 1;
    df[i] = jf.derivative(a);
    dg[i] = jg.derivative(a);
  }
  double s = 0.0;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) s += P[a][b] * df[a] * dg[b];
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("poisson");

TEST_CASE("pencil reproduces the explicit bracket matrices") {
  Expr w = parse_expr("y*exp(x)+z*exp(2*x)");
  const double a = 1.0, b = 2.0;
  auto [L0, L1] = hirota_lax(w, a, b);
  const PoissonPencil P = pencil_from_lax(L0, L1);

  auto pts = sample_admissible_points(w, Chart::xyz(), {-1, 0.1, 0.1}, {1, 1, 1}, 10, 5);
  for (const Vec3& q : pts) {
    const double p5[] = {q[0], q[1], q[2], 0.37, -0.8};
    const Jet jw = eval_jet(w, Chart::xyz(), q, 1);
    const double wx = jw.derivative({1, 0, 0}), wy = jw.derivative({0, 1, 0}),
                 wz = jw.derivative({0, 0, 1});
    const auto P0 = P.P0.at(p5), P1 = P.P1.at(p5);

    std::array<std::array<double, 5>, 5> expect0{};
    expect0[0][3] = -wz / wx;
    expect0[0][4] = -wy / wx;
    expect0[1][4] = 1.0;
    expect0[2][3] = 1.0;
    std::array<std::array<double, 5>, 5> expect1{};
    expect1[1][4] = b;
    expect1[2][3] = a;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < i; ++j) {
        expect0[i][j] = -expect0[j][i];
        expect1[i][j] = -expect1[j][i];
      }
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        CHECK(P0[i][j] == doctest::Approx(expect0[i][j]).epsilon(1e-12));
        CHECK(P1[i][j] == doctest::Approx(expect1[i][j]).epsilon(1e-12));
      }
  }

  LambdaVectorField quad{Chart::xyz(),
                         {{Expr::constant(1.0), Expr::constant(0.0), Expr::constant(0.0)},
                          {Expr::constant(0.0), Expr::constant(1.0), Expr::constant(0.0)},
                          {Expr::constant(0.0), Expr::constant(0.0), Expr::constant(1.0)}}};
  CHECK_THROWS_AS(pencil_from_lax(quad, L1), std::invalid_argument);
}

TEST_CASE("hyper-CR pencil matches the Heisenberg display") {
  const double eps = 0.7;
  auto [L0, L1] = hypercr_lax(parse_expr("0.35*X^2"));  // eps/2 X^2 with eps = 0.7
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const double p5[] = {0.6, -0.2, 0.9, 0.1, 0.2};
  const auto P0 = P.P0.at(p5), P1 = P.P1.at(p5);
  CHECK(P0[1][3] == doctest::Approx(1.0));   // d_Y ^ d_p0
  CHECK(P0[0][4] == doctest::Approx(1.0));   // d_X ^ d_p1
  CHECK(P1[2][3] == doctest::Approx(-1.0));  // -(d_T) ^ d_p0
  CHECK(P1[1][4] == doctest::Approx(-1.0));  // -(d_Y + eps X d_X) ^ d_p1
  CHECK(P1[0][4] == doctest::Approx(-eps * 0.6));
  CHECK(P0[0][3] == 0.0);
}

TEST_CASE("jacobiator: solution passes, xy+z pins -2") {
  Expr wsol = parse_expr("y*exp(x)+z*exp(2*x)");
  auto [L0, L1] = hirota_lax(wsol, 1.0, 2.0);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  auto pts = sample_admissible_points(wsol, Chart::xyz(), {-1, 0.1, 0.1}, {1, 1, 1}, 20, 11);
  for (const Vec3& q : pts) {
    const double p5[] = {q[0], q[1], q[2], 0.3, 0.4};
    for (double lam : {0.0, 1.0, -1.0, 3.0})
      CHECK(jacobiator(P, p5, lam).max_abs() <= 1e-10);
  }

  Expr wbad = parse_expr("x*y+z");
  auto [M0, M1] = hirota_lax(wbad, 1.0, 2.0);
  const PoissonPencil Q = pencil_from_lax(M0, M1);
  const double p5[] = {1.0, 1.0, 1.0, 0.2, 0.5};
  const Jacobiator5 J = jacobiator(Q, p5, 1.0);
  CHECK(J.at(0, 3, 4) == doctest::Approx(-2.0).epsilon(1e-12));  // J^{x,p0,p1}
  for (size_t i = 0; i < Jacobiator5::combos.size(); ++i) {
    const auto& t = Jacobiator5::combos[i];
    if (t[0] == 0 && t[1] == 3 && t[2] == 4) continue;
    CHECK(std::abs(J.comp[i]) <= 1e-13);
  }
  // total antisymmetry of the component lookup
  CHECK(J.at(3, 0, 4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(J.at(0, 0, 4) == 0.0);

  // lambda = 0: the base commutator vanishes identically
  CHECK(jacobiator(Q, p5, 0.0).max_abs() <= 1e-13);
}

TEST_CASE("pencil-commutator bridge on random fields") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ul(-1.5, 1.5);
  for (int trial = 0; trial < 4; ++trial) {
    Expr w = random_poly3(rng);
    auto [L0, L1] = hirota_lax(w, 1.0, 2.0);
    const PoissonPencil P = pencil_from_lax(L0, L1);
    const LambdaVectorField C = commutator(L0, L1);
    auto pts = sample_admissible_points(w, Chart::xyz(), {-1, -1, -1}, {1, 1, 1}, 4, 300 + trial);
    for (const Vec3& q : pts) {
      const double lam = ul(rng);
      const double p5[] = {q[0], q[1], q[2], -0.4, 0.9};
      const Jacobiator5 J = jacobiator(P, p5, lam);
      const Vec3 cv = C.eval(q, lam);
      for (int beta = 0; beta < 3; ++beta)
        CHECK(J.at(beta, 3, 4) == doctest::Approx(cv[beta]).epsilon(1e-10));
      for (size_t i = 0; i < Jacobiator5::combos.size(); ++i) {
        const auto& t = Jacobiator5::combos[i];
        if (t[1] == 3 && t[2] == 4) continue;
        CHECK(std::abs(J.comp[i]) <= 1e-11);
      }
    }
  }
}

TEST_CASE("jacobiator is quadratic in lambda") {
  Expr w = parse_expr("x*y+z+0.3*x*z^2");  // generic non-solution
  auto [L0, L1] = hirota_lax(w, 1.0, 2.0);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const double p5[] = {0.8, 0.9, 0.4, 0.1, 0.2};
  const Jacobiator5 j0 = jacobiator(P, p5, 0.0);
  const Jacobiator5 jp = jacobiator(P, p5, 1.0);
  const Jacobiator5 jm = jacobiator(P, p5, -1.0);
  const Jacobiator5 j3 = jacobiator(P, p5, 3.0);
  for (size_t i = 0; i < 10; ++i) {
    // quadratic through lambda = 0, 1, -1 evaluated at lambda = 3
    const double c0 = j0.comp[i];
    const double c2 = (jp.comp[i] + jm.comp[i]) / 2.0 - c0;
    const double c1 = (jp.comp[i] - jm.comp[i]) / 2.0;
    const double predict = c0 + 3.0 * c1 + 9.0 * c2;
    CHECK(j3.comp[i] == doctest::Approx(predict).epsilon(1e-10));
  }
}

TEST_CASE("Casimirs") {
  Expr w = parse_expr("x*y+z");
  auto [L0, L1] = hirota_lax(w, 1.0, 2.0);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const double p5[] = {1.0, 1.0, 1.0, 0.0, 0.0};

  // lambda = 0: w itself is the Casimir
  const auto vw = casimir_apply(P, w, p5, 0.0);
  for (double v : vw) CHECK(std::abs(v) <= 1e-13);

  // negative control: C = x is not
  const auto vx = casimir_apply(P, Expr::symbol("x"), p5, 0.0);
  double mx = 0.0;
  for (double v : vx) mx = std::max(mx, std::abs(v));
  CHECK(mx == doctest::Approx(1.0));  // |w_z/w_x| at (1,1,1)

  // Heisenberg pencil: the twistor function at fixed lambda is the Casimir
  const double eps = 1.0, lam = 0.3;
  auto [H0, H1] = hypercr_lax(parse_expr("X^2/2"));
  const PoissonPencil HP = pencil_from_lax(H0, H1);
  Expr psi = parse_expr("T+l*Y-(l/eps)*ln(1-l*eps*X)");
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int t = 0; t < 10; ++t) {
    const double q5[] = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    // bind lambda into the expression, then contract with the pencil at lam
    const auto v = casimir_apply(HP, psi, q5, lam, {{"l", lam}, {"eps", eps}});
    for (double x : v) CHECK(std::abs(x) <= 1e-10);
  }
}

TEST_CASE("expansion coefficients of the Casimir are in involution") {
  auto [H0, H1] = hypercr_lax(parse_expr("X^2/2"));
  const PoissonPencil P = pencil_from_lax(H0, H1);
  // lambda-expansion of the Nil twistor function: T, Y, X, X^2/2, X^3/3, ...
  const std::vector<Expr> coeffs = {parse_expr("T"), parse_expr("Y"), parse_expr("X"),
                                    parse_expr("X^2/2"), parse_expr("X^3/3")};
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    const double p5[] = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    for (size_t i = 0; i < coeffs.size(); ++i)
      for (size_t j = 0; j < coeffs.size(); ++j) {
        CHECK(std::abs(bracket(P.P0, coeffs[i], coeffs[j], p5)) <= 1e-13);
        CHECK(std::abs(bracket(P.P1, coeffs[i], coeffs[j], p5)) <= 1e-13);
      }
    // negative control: fibre coordinates do not commute with everything
    CHECK(std::abs(bracket(P.P0, Expr::symbol("X"), Expr::symbol("p1"), p5)) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("e-forms annihilate the symplectic-leaf distribution") {
  Expr w = parse_expr("y*exp(x)+z*exp(2*x)");
  auto [L0, L1] = hirota_lax(w, 1.0, 2.0);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const EFormTriple ef = eform(P);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ul(-2.0, 2.0);
  auto pts = sample_admissible_points(w, Chart::xyz(), {-1, 0.1, 0.1}, {1, 1, 1}, 8, 43);
  for (const Vec3& q : pts) {
    const double lam = ul(rng);
    const double p5[] = {q[0], q[1], q[2], 0.2, -0.1};
    const auto e = eform_at(ef, lam, p5);
    // e descends to the base
    CHECK(e[3] == 0.0);
    CHECK(e[4] == 0.0);
    const Vec3 v0 = L0.eval(q, lam), v1 = L1.eval(q, lam);
    double pair0 = 0, pair1 = 0;
    for (int i = 0; i < 3; ++i) {
      pair0 += e[i] * v0[i];
      pair1 += e[i] * v1[i];
    }
    const double scale = std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]);
    CHECK(std::abs(pair0) <= 1e-10 * std::max(1.0, scale));
    CHECK(std::abs(pair1) <= 1e-10 * std::max(1.0, scale));

    // quadratic reconstruction against the direct contraction at lambda = 2
    const auto e2 = eform_at(ef, 2.0, p5);
    const auto oracle = contract_oracle(P.at_lambda(2.0).at(p5));
    for (int mu = 0; mu < 5; ++mu) CHECK(e2[mu] == doctest::Approx(oracle[mu]).epsilon(1e-11));
  }
}

TEST_CASE("conformal structure from e-forms") {
  // flat pencil: constant e-forms
  auto [F0, F1] = hirota_lax(parse_expr("x+y+z"), 1.0, 2.0);
  const EFormTriple fef = eform(pencil_from_lax(F0, F1));
  const double pa[] = {0.1, 0.2, 0.3, 0, 0};
  const double pb[] = {-0.5, 0.8, 0.9, 0, 0};
  for (double lam : {0.0, 0.7}) {
    const auto ea = eform_at(fef, lam, pa), eb = eform_at(fef, lam, pb);
    for (int mu = 0; mu < 5; ++mu) CHECK(ea[mu] == doctest::Approx(eb[mu]).epsilon(1e-14));
  }

  // solution: h from e-forms is pointwise proportional to the Hirota form
  Expr w = parse_expr("y*exp(x)+z*exp(2*x)");
  auto [L0, L1] = hirota_lax(w, 1.0, 2.0);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const EFormTriple ef = eform(P);
  const Mat3T<Expr> hrec = conformal_from_eforms(ef);
  WeylStructure W = hirota_weyl(w, 1.0, 2.0);
  auto pts = sample_admissible_points(w, Chart::xyz(), {-1, 0.1, 0.1}, {1, 1, 1}, 6, 47);
  for (const Vec3& q : pts) {
    const double p5[] = {q[0], q[1], q[2], 0.0, 0.0};
    const Mat3 target = weyl_metric_at(W, q);
    Mat3 got;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) got[i][j] = eval_jet(hrec[i][j], ef.chart5, p5, 0).value();
    // all six independent ratios agree
    const double r0 = got[0][0] / target[0][0];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        CHECK(got[i][j] / target[i][j] == doctest::Approx(r0).epsilon(1e-8));
  }

  // Frobenius condition e ^ de = 0 for the solution
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> ul(-1.5, 1.5);
  for (const Vec3& q : pts) {
    const double p5[] = {q[0], q[1], q[2], 0.4, 0.6};
    const double scale = std::abs(eform_at(ef, 1.0, p5)[0]);
    CHECK(eform_frobenius(ef, p5, ul(rng)) <= 1e-10 * std::max(1.0, scale));
  }

  // non-solution: Frobenius obstruction is visible
  Expr wbad = parse_expr("x*y+z");
  auto [B0, B1] = hirota_lax(wbad, 1.0, 2.0);
  const EFormTriple befo = eform(pencil_from_lax(B0, B1));
  const double pbad[] = {1.0, 1.0, 1.0, 0.0, 0.0};
  CHECK(eform_frobenius(befo, pbad, 1.0) > 1e-3);
}

TEST_CASE("Hamiltonian flows are vertical and affine") {
  Expr w = parse_expr("x*y+z");
  auto [L0, L1] = hirota_lax(w, 1.0, 2.0);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const double p5[] = {1.0, 1.0, 1.0, 0.25, -0.5};

  // f = w at lambda = 0 is stationary (it is the Casimir)
  const FlowResult fw = hamiltonian_flow(P, w, p5, 0.0, 2.0);
  for (int i = 0; i < 5; ++i) CHECK(fw.endpoint[i] == doctest::Approx(p5[i]).epsilon(1e-14));

  // f = x at lambda = 0: fibre rates (w_z/w_x, w_y/w_x) = (1, 1)
  const FlowResult fx = hamiltonian_flow(P, Expr::symbol("x"), p5, 0.0, 3.0);
  CHECK(fx.rates[0] == 0.0);
  CHECK(fx.rates[1] == 0.0);
  CHECK(fx.rates[2] == 0.0);
  CHECK(fx.rates[3] == doctest::Approx(1.0));
  CHECK(fx.rates[4] == doctest::Approx(1.0));
  CHECK(fx.endpoint[0] == 1.0);
  CHECK(fx.endpoint[3] == doctest::Approx(0.25 + 3.0));

  // generic lambda: rates are (-L0 f, -L1 f) evaluated at lambda
  const double lam = 0.8;
  auto [A0, A1] = hirota_lax(w, 1.0, 2.0);
  const std::span<const double> base(p5, 3);
  for (const Expr& f : {Expr::symbol("x"), Expr::symbol("y"), Expr::symbol("z")}) {
    const FlowResult fr = hamiltonian_flow(P, f, p5, lam, 1.0);
    const Vec3 v0 = A0.eval(base, lam), v1 = A1.eval(base, lam);
    const Jet jf = eval_jet(f, Chart::xyz(), base, 1);
    double df[3];
    for (int i = 0; i < 3; ++i) {
      MultiIndex a(3, 0);
      a[i] = 1;
      df[i] = jf.derivative(a);
    }
    const double L0f = v0[0] * df[0] + v0[1] * df[1] + v0[2] * df[2];
    const double L1f = v1[0] * df[0] + v1[1] * df[1] + v1[2] * df[2];
    CHECK(fr.rates[3] == doctest::Approx(-L0f).epsilon(1e-13));
    CHECK(fr.rates[4] == doctest::Approx(-L1f).epsilon(1e-13));
    for (int i = 0; i < 3; ++i) CHECK(fr.endpoint[i] == p5[i]);
  }
}

TEST_CASE("Heisenberg pencil invariance") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double lam : {0.0, 2.0, -0.7}) {
    const double p5[] = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    const HeisenbergInvariance rep = heisenberg_invariance(1.0, p5, lam);
    CHECK(rep.lie_RX_P0 <= 1e-11);
    CHECK(rep.lie_RX_P1_plus_eps <= 1e-11);
    CHECK(rep.lie_RY <= 1e-11);
    CHECK(rep.lie_RT <= 1e-11);
    CHECK(rep.sign == -1);
  }
  CHECK_THROWS_AS(heisenberg_invariance(0.0, std::array<double, 5>{0, 0, 0, 0, 0}, 1.0),
                  std::invalid_argument);
}

TEST_SUITE_END();
