#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "veroweb/expr.hpp"
#include "veroweb/grid.hpp"
#include "veroweb/parser.hpp"

using namespace veroweb;

TEST_SUITE_BEGIN("fields");

TEST_CASE("eval_jet on closed forms") {
  const Chart xyz = Chart::xyz();

  // w = y exp(x) + z exp(2x) at (0,1,1): value 2, gradient (3,1,1)
  Expr w = parse_expr("y*exp(x)+z*exp(2*x)");
  const double p[] = {0.0, 1.0, 1.0};
  Jet jw = eval_jet(w, xyz, p, 1);
  CHECK(jw.value() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(jw.derivative({1, 0, 0}) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(jw.derivative({0, 1, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jw.derivative({0, 0, 1}) == doctest::Approx(1.0).epsilon(1e-15));

  Expr lin = parse_expr("x+y+z");
  const double q[] = {0.37, -1.4, 2.2};
  Jet jl = eval_jet(lin, xyz, q, 2);
  CHECK(jl.derivative({1, 0, 0}) == 1.0);
  CHECK(jl.derivative({0, 1, 0}) == 1.0);
  CHECK(jl.derivative({0, 0, 1}) == 1.0);
  for (int r = 0; r < jl.space().size(); ++r)
    if (multi_index_order(jl.space().index_at(r)) == 2) CHECK(jl.coeffs()[r] == 0.0);

  // H = eps X^2/2 at (2,0,0) with eps = 1
  Expr H = parse_expr("eps*X^2/2");
  const Chart XYT = Chart::XYT();
  const double pc[] = {2.0, 0.0, 0.0};
  Jet jh = eval_jet(H, XYT, pc, 2, {{"eps", 1.0}});
  CHECK(jh.value() == doctest::Approx(2.0));
  CHECK(jh.derivative({1, 0, 0}) == doctest::Approx(2.0));
  CHECK(jh.derivative({2, 0, 0}) == doctest::Approx(1.0));
  CHECK(jh.coeff({2, 0, 0}) == doctest::Approx(0.5));

  CHECK_THROWS_AS(eval_jet(H, XYT, pc, 2), std::invalid_argument);  // eps unbound

  // domain violations propagate from the jet layer
  Expr bad = parse_expr("ln(x-2)");
  const double neg[] = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(eval_jet(bad, xyz, neg, 1), DegenerateInputError);
  Expr div0 = parse_expr("1/(y-1)");
  const double pole[] = {0.0, 1.0, 0.0};
  CHECK_THROWS_AS(eval_jet(div0, xyz, pole, 1), DegenerateInputError);
}

TEST_CASE("parser: parameters, errors, round trip") {
  Expr e = parse_expr("y*exp(a*x)+z*exp(b*x)");
  auto syms = symbols(e);
  CHECK(syms.count("a") == 1);
  CHECK(syms.count("b") == 1);
  CHECK(syms.count("x") == 1);

  // the Heisenberg Casimir expression parses
  Expr cas = parse_expr("(1-eps*l4*X)*exp(-eps*(T/l4+Y))");
  const Chart XYT = Chart::XYT();
  const double p[] = {0.2, 0.1, -0.3};
  const Bindings binds{{"eps", 1.0}, {"l4", -1.0}};
  const double v = eval_scalar(cas, XYT, p, binds);
  CHECK(v == doctest::Approx((1.0 + 0.2) * std::exp(-(-(-0.3)) - 0.1)).epsilon(1e-12));

  CHECK_THROWS_AS(parse_expr("x+*y"), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse_expr("(x+y"), ParseError);

  // parse -> print -> parse is idempotent (prints then evaluates identically)
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.3, 1.7);
  for (const char* text : {"y*exp(a*x)+z*exp(b*x)", "x+y+z", "(x-y)^3/(1+z^2)",
                           "sqrt(x^2+1)-ln(2+y)*sin(z)", "-x^2+4"}) {
    Expr e1 = parse_expr(text);
    Expr e2 = parse_expr(to_string(e1));
    CHECK(to_string(e1) == to_string(e2));
    const Chart xyz = Chart::xyz();
    for (int trial = 0; trial < 5; ++trial) {
      const double q[] = {u(rng), u(rng), u(rng)};
      const Bindings ab{{"a", 1.0}, {"b", 2.0}};
      CHECK(eval_scalar(e1, xyz, q, ab) ==
            doctest::Approx(eval_scalar(e2, xyz, q, ab)).epsilon(1e-15));
    }
  }
}

TEST_CASE("symbolic diff agrees with jets") {
  const Chart xyz = Chart::xyz();
  Expr e = parse_expr("sin(x*y)/(2+z) + exp(x-z)*y^2 + sqrt(4+x)");
  Expr ex = diff(e, "x");
  Expr exy = diff(ex, "y");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int trial = 0; trial < 10; ++trial) {
    const double p[] = {u(rng), u(rng), u(rng)};
    Jet j = eval_jet(e, xyz, p, 2);
    CHECK(eval_scalar(ex, xyz, p) == doctest::Approx(j.derivative({1, 0, 0})).epsilon(1e-12));
    CHECK(eval_scalar(exy, xyz, p) == doctest::Approx(j.derivative({1, 1, 0})).epsilon(1e-12));
  }
}

TEST_CASE("program compiles and matches eval_scalar") {
  const Chart xyz = Chart::xyz();
  Expr e = parse_expr("exp(x)*sin(y)+z^3/(1+x^2)-k*y");
  Program prog = Program::compile(e, xyz, {{"k", 0.7}});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double p[] = {u(rng), u(rng), u(rng)};
    CHECK(prog.eval(p) == doctest::Approx(eval_scalar(e, xyz, p, {{"k", 0.7}})).epsilon(1e-15));
  }
}

TEST_CASE("fd_derivative stencils") {
  using std::numbers::pi;
  // sampled sin on [0, 2pi), periodic: d/dX -> cos with O(h^2) error
  const int n = 64;
  GridAxis X{"X", 0.0, 2 * pi / n, n, true};
  GridAxis T{"T", 0.0, 1.0, 5, false};
  GridField s = GridField::sample(parse_expr("sin(X)"), {X, T});
  GridField ds = fd_derivative(s, {1, 0});
  double max_err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 5; ++j)
      max_err = std::max(max_err, std::abs(ds.at(i, j) - std::cos(X.coord(i))));
  const double h = X.spacing;
  CHECK(max_err < h * h);
  CHECK(max_err > 0.01 * h * h);

  // constant grid -> zero derivative
  GridField c = GridField::sample(parse_expr("3"), {X, T});
  GridField dc = fd_derivative(c, {1, 1});
  for (double v : dc.values) CHECK(v == 0.0);

  // X^2: second derivative exact (= 2) everywhere, including one-sided edges
  GridAxis Xo{"X", -1.0, 0.125, 17, false};
  GridField q = GridField::sample(parse_expr("X^2"), {Xo, T});
  GridField qxx = fd_derivative(q, {2, 0});
  for (double v : qxx.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-10));

  CHECK_THROWS_AS(fd_derivative(q, {3, 0}), std::invalid_argument);
  GridAxis tiny{"X", 0.0, 0.1, 3, false};
  GridField small = GridField::sample(parse_expr("X"), {tiny, T});
  CHECK_THROWS_AS(fd_derivative(small, {1, 0}), std::invalid_argument);
}

TEST_CASE("fd agrees with jets at O(h^2)") {
  using std::numbers::pi;
  const Chart chart{{"X", "T"}};
  Expr e = parse_expr("sin(X)*cos(T)+0.3*sin(2*T)");
  std::vector<double> hs, errs;
  for (int n : {32, 64, 128}) {
    GridAxis X{"X", -pi, 2 * pi / n, n, true};
    GridAxis T{"T", -pi, 2 * pi / n, n, true};
    GridField g = GridField::sample(e, {X, T});
    GridField gx = fd_derivative(g, {1, 1});
    double max_err = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double p[] = {X.coord(i), T.coord(j)};
        Jet jx = eval_jet(e, chart, p, 2);
        max_err = std::max(max_err, std::abs(gx.at(i, j) - jx.derivative({1, 1})));
      }
    hs.push_back(X.spacing);
    errs.push_back(max_err);
  }
  const double slope =
      std::log(errs[2] / errs[0]) / std::log(hs[2] / hs[0]);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("grid CSV round trip") {
  GridAxis X{"X", -1.0, 0.25, 9, false};
  GridAxis T{"T", 0.0, 0.5, 5, false};
  GridField g = GridField::sample(parse_expr("exp(X)*T+0.123456789012345"), {X, T});
  const std::string path = "test_grid_roundtrip.csv";
  save_csv(g, path);
  GridField back = load_csv(path);
  REQUIRE(back.dim() == 2);
  CHECK(back.axes[0].count == 9);
  CHECK(back.axes[1].count == 5);
  CHECK(back.axes[0].spacing == doctest::Approx(0.25).epsilon(1e-14));
  for (size_t i = 0; i < g.values.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(g.values[i]).epsilon(1e-14));
  std::remove(path.c_str());

  GridAxis Z{"z", 0.1, 0.2, 6, false};
  GridField g3 = GridField::sample(parse_expr("X*T+z^2"), {X, T, Z});
  save_csv(g3, path);
  GridField back3 = load_csv(path);
  REQUIRE(back3.dim() == 3);
  CHECK(back3.axes[2].count == 6);
  for (size_t i = 0; i < g3.values.size(); ++i)
    CHECK(back3.values[i] == doctest::Approx(g3.values[i]).epsilon(1e-14));
  std::remove(path.c_str());
}

TEST_SUITE_END();
