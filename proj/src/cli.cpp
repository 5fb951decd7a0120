#include "veroweb/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "veroweb/conventions.hpp"
#include "veroweb/geometry.hpp"
#include "veroweb/laxweb.hpp"
#include "veroweb/parser.hpp"
#include "veroweb/pdesolve.hpp"
#include "veroweb/poisson.hpp"
#include "veroweb/report.hpp"
#include "veroweb/twistor.hpp"

namespace veroweb {

namespace {

struct CommonOpts {
  uint64_t seed = 7;
  int points = 20;
  std::string out;                       // report path; stdout when empty
  std::vector<double> box_lo{-1.0, 0.1, 0.1};
  std::vector<double> box_hi{1.0, 1.0, 1.0};
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "random seed recorded in the report");
  cmd->add_option("--points", c.points, "number of sample points");
  cmd->add_option("--out", c.out, "report output path (stdout when omitted)");
  cmd->add_option("--box-lo", c.box_lo, "sample box lower corner")->expected(3);
  cmd->add_option("--box-hi", c.box_hi, "sample box upper corner")->expected(3);
}

int finish(RunReport& rep, const CommonOpts& c) {
  rep.timestamp = iso_timestamp_now();
  const std::string text = rep.to_json().dump(2);
  if (c.out.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream os(c.out);
    if (!os) throw std::runtime_error("cannot write report to " + c.out);
    os << text << "\n";
  }
  return rep.all_pass() ? 0 : 1;
}

Vec3 to_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

// verify-ew: Einstein-Weyl residual of the Hirota (or hyper-CR) structure
int cmd_verify_ew(const std::string& wtxt, const std::string& Htxt, double a, double b,
                  double tol, const CommonOpts& c) {
  RunReport rep;
  rep.command = "verify-ew";
  rep.seed = c.seed;
  rep.params = {{"w", wtxt}, {"H", Htxt}, {"a", a}, {"b", b}, {"tol", tol}, {"points", c.points}};

  const Bindings binds{{"a", a}, {"b", b}};
  if (!wtxt.empty()) {
    const Expr w = parse_expr(wtxt);
    const WeylStructure W = hirota_weyl(w, a, b);
    const auto pts = sample_admissible_points(w, Chart::xyz(), to_vec3(c.box_lo),
                                              to_vec3(c.box_hi), c.points, c.seed, 1e-6, binds);
    double worst = 0.0;
    for (const Vec3& p : pts) worst = std::max(worst, curvature(W, p, binds).e_norm());
    rep.add("einstein_weyl_residual", worst, tol);
  } else {
    const Expr H = parse_expr(Htxt);
    const WeylStructure W = hypercr_weyl(H);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < c.points; ++t) {
      Vec3 p;
      for (int i = 0; i < 3; ++i) p[i] = c.box_lo[i] + (c.box_hi[i] - c.box_lo[i]) * u(rng);
      worst = std::max(worst, curvature(W, p, binds).e_norm());
    }
    rep.add("einstein_weyl_residual", worst, tol);
  }
  return finish(rep, c);
}

int cmd_verify_jacobi(const std::string& wtxt, double a, double b,
                      const std::vector<double>& lambdas, double tol,
                      const std::vector<double>& probe, const std::string& csv,
                      const CommonOpts& c) {
  RunReport rep;
  rep.command = "verify-jacobi";
  rep.seed = c.seed;
  rep.params = {{"w", wtxt}, {"a", a}, {"b", b}, {"lambda", lambdas}, {"tol", tol}};

  const Expr w = parse_expr(wtxt);
  auto [L0, L1] = hirota_lax(w, a, b);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const auto pts = sample_admissible_points(w, Chart::xyz(), to_vec3(c.box_lo),
                                            to_vec3(c.box_hi), c.points, c.seed);

  std::ofstream csv_os;
  if (!csv.empty()) {
    csv_os.open(csv);
    csv_os.precision(17);
    csv_os << "lambda,x,y,z,maxJ\n";
  }
  double worst = 0.0;
  for (double lam : lambdas)
    for (const Vec3& q : pts) {
      const double p5[5] = {q[0], q[1], q[2], 0.0, 0.0};
      const double v = jacobiator(P, p5, lam).max_abs();
      worst = std::max(worst, v);
      if (csv_os.is_open())
        csv_os << lam << "," << q[0] << "," << q[1] << "," << q[2] << "," << v << "\n";
    }
  rep.add("jacobi_identity", worst, tol);

  const double probe5[5] = {probe[0], probe[1], probe[2], 0.0, 0.0};
  const Jacobiator5 J = jacobiator(P, probe5, lambdas.front());
  rep.params["probe"] = {{"point", probe},
                         {"lambda", lambdas.front()},
                         {"J_x_p0_p1", J.at(0, 3, 4)}};
  return finish(rep, c);
}

int cmd_lax_commutator(const std::string& wtxt, const std::string& Htxt, double a, double b,
                       double tol, const std::string& csv, const CommonOpts& c) {
  RunReport rep;
  rep.command = "lax-commutator";
  rep.seed = c.seed;
  rep.params = {{"w", wtxt}, {"H", Htxt}, {"a", a}, {"b", b}, {"tol", tol}};

  std::ofstream csv_os;
  if (!csv.empty()) {
    csv_os.open(csv);
    csv_os.precision(17);
    csv_os << "x,y,z,lambda,residual\n";
  }

  if (!wtxt.empty()) {
    const Expr w = parse_expr(wtxt);
    const Bindings binds{{"a", a}, {"b", b}};
    auto [L0, L1] = hirota_lax(w, a, b);
    const LambdaVectorField C = commutator(L0, L1);
    const auto pts = sample_admissible_points(w, Chart::xyz(), to_vec3(c.box_lo),
                                              to_vec3(c.box_hi), c.points, c.seed, 1e-6, binds);
    double structural = 0.0;  // defect of [L0,L1] = lambda (rho/w_x^2) d_x
    for (const Vec3& p : pts) {
      const Jet jw = eval_jet(w, Chart::xyz(), p, 1, binds);
      const double wx = jw.derivative({1, 0, 0});
      const double rho = hirota_residual(w, a, b, p, binds);
      for (int k = 0; k <= C.degree(); ++k) {
        for (int i = 0; i < 3; ++i) {
          const double v = C.coeffs[k][i].empty()
                               ? 0.0
                               : eval_jet(C.coeffs[k][i], Chart::xyz(), p, 0, binds).value();
          const double expect = (k == 1 && i == 0) ? rho / (wx * wx) : 0.0;
          structural = std::max(structural, std::abs(v - expect));
        }
      }
      if (csv_os.is_open())
        for (double lam : {0.0, 1.0, -1.0})
          csv_os << p[0] << "," << p[1] << "," << p[2] << "," << lam << "," << rho << "\n";
    }
    rep.add("commutator_structure", structural, tol);
  } else {
    const Expr H = parse_expr(Htxt);
    auto [L0, L1] = hypercr_lax(H);
    const LambdaVectorField C = commutator(L0, L1);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double structural = 0.0;
    for (int t = 0; t < c.points; ++t) {
      Vec3 p;
      for (int i = 0; i < 3; ++i) p[i] = c.box_lo[i] + (c.box_hi[i] - c.box_lo[i]) * u(rng);
      const double rho = hypercr_residual(H, p);
      for (int k = 0; k <= C.degree(); ++k)
        for (int i = 0; i < 3; ++i) {
          const double v = C.coeffs[k][i].empty()
                               ? 0.0
                               : eval_jet(C.coeffs[k][i], Chart::XYT(), p, 0).value();
          const double expect = (k == 2 && i == 0) ? rho : 0.0;
          structural = std::max(structural, std::abs(v - expect));
        }
    }
    rep.add("commutator_structure", structural, tol);
  }
  return finish(rep, c);
}

int cmd_veronese(const std::string& wtxt, double a, double b, double tol, const CommonOpts& c) {
  RunReport rep;
  rep.command = "veronese-check";
  rep.seed = c.seed;
  rep.params = {{"w", wtxt}, {"a", a}, {"b", b}, {"tol", tol}};

  const Expr w = parse_expr(wtxt);
  const WeylStructure W = hirota_weyl(w, a, b);
  const VeroneseTriple vt = veronese_fields(w, a, b);
  auto [L0, L1] = hirota_lax(w, a, b);
  const auto pts = sample_admissible_points(w, Chart::xyz(), to_vec3(c.box_lo),
                                            to_vec3(c.box_hi), c.points, c.seed);
  double null_worst = 0.0, orth_worst = 0.0;
  int span_ok = 1;
  const Chart xyz = Chart::xyz();
  for (const Vec3& q : pts) {
    const Mat3 h = weyl_metric_at(W, q);
    for (double lam : {0.0, 1.0, -1.0, 2.0, 5.0}) {
      const Vec3 V = veronese_eval(vt, lam, q);
      double hVV = 0.0, hVc1 = 0.0, hVc2 = 0.0;
      Vec3 c1{}, c2{};
      for (int i = 0; i < 3; ++i) {
        const double a1 = eval_scalar(vt.V1[i], xyz, q);
        const double a2 = eval_scalar(vt.V2[i], xyz, q);
        const double a3 = eval_scalar(vt.V3[i], xyz, q);
        c1[i] = a1 - lam * a2;
        c2[i] = a2 - lam * a3;
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          hVV += h[i][j] * V[i] * V[j];
          hVc1 += h[i][j] * V[i] * c1[j];
          hVc2 += h[i][j] * V[i] * c2[j];
        }
      null_worst = std::max(null_worst, std::abs(hVV));
      orth_worst = std::max({orth_worst, std::abs(hVc1), std::abs(hVc2)});
    }
    // Lax plane matches the Veronese plane under mu = -1/lambda
    const double lam = 2.0;
    Vec3 c1{}, c2{};
    const double mu = -1.0 / lam;
    for (int i = 0; i < 3; ++i) {
      const double a1 = eval_scalar(vt.V1[i], xyz, q);
      const double a2 = eval_scalar(vt.V2[i], xyz, q);
      const double a3 = eval_scalar(vt.V3[i], xyz, q);
      c1[i] = a1 - mu * a2;
      c2[i] = a2 - mu * a3;
    }
    if (span_rank({L0.eval(q, lam), L1.eval(q, lam), c1, c2}) != 2) span_ok = 0;
  }
  rep.add("veronese_nullity", null_worst, tol);
  rep.add("veronese_orthogonality", orth_worst, tol);
  rep.add("lax_veronese_span_match", span_ok ? 0.0 : 1.0, 0.5);
  return finish(rep, c);
}

int cmd_jones_tod(const std::string& wtxt, double a, double b, double tol, const CommonOpts& c) {
  RunReport rep;
  rep.command = "jones-tod";
  rep.seed = c.seed;
  rep.params = {{"w", wtxt}, {"a", a}, {"b", b}, {"tol", tol}};

  const Expr w = parse_expr(wtxt);
  const WeylStructure target = hirota_weyl(w, a, b);
  const KillingExtension ext = hirota_extension(w, a, b);
  const WeylStructure raw = jones_tod_reduce(ext);
  const Expr wx = diff(w, "x"), wy = diff(w, "y"), wz = diff(w, "z");
  const WeylStructure resc = conformal_rescale(raw, sqrt(wz / (wx * wy)));
  const auto pts = sample_admissible_points(w, Chart::xyz(), to_vec3(c.box_lo),
                                            to_vec3(c.box_hi), c.points, c.seed);
  double h_worst = 0.0, o_worst = 0.0;
  for (const Vec3& q : pts) {
    const Mat3 ha = weyl_metric_at(resc, q), hb = weyl_metric_at(target, q);
    const Vec3 oa = weyl_oneform_at(resc, q), ob = weyl_oneform_at(target, q);
    for (int i = 0; i < 3; ++i) {
      o_worst = std::max(o_worst, std::abs(oa[i] - ob[i]));
      for (int j = 0; j < 3; ++j) h_worst = std::max(h_worst, std::abs(ha[i][j] - hb[i][j]));
    }
  }
  rep.add("metric_match", h_worst, tol);
  rep.add("oneform_match", o_worst, tol);
  return finish(rep, c);
}

int cmd_solve_hypercr(const std::string& config_path, const std::string& grid_out,
                      double residual_tol, double y_cap, const CommonOpts& c) {
  RunReport rep;
  rep.command = "solve-hypercr";
  rep.seed = c.seed;

  std::ifstream is(config_path);
  if (!is) throw std::runtime_error("cannot open solver config " + config_path);
  std::stringstream buf;
  buf << is.rdbuf();
  const SolverConfig cfg = SolverConfig::from_json(buf.str());
  rep.params = {{"config", config_path}, {"nx", cfg.nx},     {"nt", cfg.nt},
                {"y_final", cfg.y_final}, {"steps", cfg.steps}};
  if (std::abs(cfg.y_final) > y_cap)
    throw std::invalid_argument("y_final exceeds the cap (" + std::to_string(y_cap) + ")");

  std::optional<Expr> forcing;
  if (cfg.forcing) forcing = parse_expr(*cfg.forcing);
  const EvolveResult r = hypercr_evolve(cfg.initial_state(), cfg.y_final, cfg.steps, forcing);
  if (!grid_out.empty()) save_csv(r.volume, grid_out);
  rep.params["solve_report"] = nlohmann::ordered_json::parse(r.report.to_json());
  rep.add("no_blow_up", r.report.blow_up ? 1.0 : 0.0, 0.5);
  rep.add("volume_residual", r.report.max_residual, residual_tol);
  return finish(rep, c);
}

int cmd_twistor_recursion(const std::string& Htxt, int order, double tol, const CommonOpts& c) {
  RunReport rep;
  rep.command = "twistor-recursion";
  rep.seed = c.seed;
  rep.params = {{"H", Htxt}, {"order", order}, {"tol", tol}};

  TwistorSeries ts(parse_expr(Htxt));
  bool consistent = true;
  try {
    ts.extend(order);
  } catch (const RecursionConsistencyError&) {
    consistent = false;
  }
  rep.add("recursion_consistency", consistent ? 0.0 : 1.0, 0.5);
  if (consistent) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    double wave = 0.0;
    for (int t = 0; t < c.points; ++t) {
      const double p[3] = {u(rng), u(rng), u(rng)};
      for (int i = 0; i <= order; ++i) wave = std::max(wave, std::abs(ts.wave_residual(i, p)));
    }
    rep.add("wave_equation", wave, tol);
  }
  return finish(rep, c);
}

int cmd_deform(const std::string& family_path, const std::string& ftxt, const std::string& gtxt,
               double eps, int steps, double tol, const CommonOpts& c) {
  RunReport rep;
  rep.command = "deform";
  rep.seed = c.seed;
  rep.params = {{"family", family_path}, {"f", ftxt}, {"g", gtxt}, {"eps", eps}, {"steps", steps},
                {"tol", tol}};

  std::ifstream is(family_path);
  if (!is) throw std::runtime_error("cannot open curve family " + family_path);
  std::stringstream buf;
  buf << is.rdbuf();
  const CurveFamily family = curve_family_from_json(buf.str());

  DeformationGenerator gen;
  if (!ftxt.empty()) gen.f = parse_expr(ftxt);
  if (!gtxt.empty()) gen.g = parse_expr(gtxt);
  rep.add("generator_homogeneity", homogeneity_defect(gen), 1e-10);

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(-0.35, 0.35);
  double worst = 0.0;
  for (int t = 0; t < c.points; ++t) {
    const Vec3 m{u(rng), u(rng), u(rng)};
    const DeformedFamily df = kodaira_deform(family, gen, eps, steps, m);
    const ExtractResult r = extract_coordinates(df.psi);
    worst = std::max(worst, std::abs(r.hypercr_residual));
  }
  rep.add("deformed_family_solves_hypercr", worst, tol);
  return finish(rep, c);
}

int cmd_heisenberg(double eps, double a, double b, const CommonOpts& c) {
  RunReport rep;
  rep.command = "heisenberg";
  rep.seed = c.seed;

  const HeisenbergReport hr = heisenberg_pipeline(eps, a, b, c.seed);
  rep.params = {{"eps", eps}, {"a", a}, {"b", b}, {"lambda4", hr.lambda4}, {"w", hr.w_text}};
  for (const PipelineCheck& pc : hr.checks) rep.add(pc.name, pc.residual, pc.tolerance);

  // per-generator pencil invariance norms at a fixed probe
  const double p5[5] = {0.4, -0.2, 0.3, 0.1, 0.2};
  const HeisenbergInvariance inv = heisenberg_invariance(eps, p5, 2.0);
  rep.params["pencil_invariance"] = {{"lie_RX_P0", inv.lie_RX_P0},
                                     {"lie_RX_P1_defect", inv.lie_RX_P1_plus_eps},
                                     {"lie_RY", inv.lie_RY},
                                     {"lie_RT", inv.lie_RT},
                                     {"sign", inv.sign}};
  return finish(rep, c);
}

int cmd_hierarchy(int n, double kappa, std::vector<double> consts, double tol,
                  const CommonOpts& c) {
  RunReport rep;
  rep.command = "hierarchy-check";
  rep.seed = c.seed;

  if (consts.empty())
    for (int i = 1; i <= n; ++i) consts.push_back(static_cast<double>(i));
  rep.params = {{"n", n}, {"kappa", kappa}, {"constants", consts}, {"tol", tol}};
  const HierarchySpec spec = HierarchySpec::make(consts);

  // w = sum_i x_i exp(kappa x / a_i) solves every pair of the hierarchy
  std::ostringstream wtxt;
  for (int i = 0; i < n; ++i) {
    if (i) wtxt << "+";
    wtxt << "x" << i << "*exp(" << kappa << "*x/" << consts[i] << ")";
  }
  const Expr w = parse_expr(wtxt.str());
  rep.params["w"] = wtxt.str();

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  double worst = 0.0;
  for (int t = 0; t < c.points; ++t) {
    std::vector<double> p(n + 1);
    for (double& x : p) x = u(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        worst = std::max(worst, std::abs(hierarchy_residual(w, spec, i, j, p)));
      }
  }
  rep.add("hierarchy_residuals", worst, tol);

  // the n = 2 slice reproduces -1 x the Hirota residual
  {
    const HierarchySpec spec2 = HierarchySpec::make({consts[0], consts[1]});
    const Expr w_xyz = parse_expr("x^2*y+y*z^2+exp(x)*z");
    const Expr w_hier = parse_expr("x^2*x1+x1*x0^2+exp(x)*x0");
    double bridge = 0.0;
    for (int t = 0; t < c.points; ++t) {
      const double x = u(rng), y = u(rng), z = u(rng);
      const double pxyz[3] = {x, y, z};
      const double phier[3] = {x, z, y};
      bridge = std::max(bridge,
                        std::abs(hirota_residual(w_xyz, consts[0], consts[1], pxyz) +
                                 hierarchy_residual(w_hier, spec2, 0, 1, phier)));
    }
    rep.add("n2_matches_hirota", bridge, tol);
  }
  return finish(rep, c);
}

int cmd_eform(const std::string& wtxt, double a, double b, double pair_tol, double frob_tol,
              double ratio_tol, const CommonOpts& c) {
  RunReport rep;
  rep.command = "eform-check";
  rep.seed = c.seed;
  rep.params = {{"w", wtxt}, {"a", a}, {"b", b}};

  const Expr w = parse_expr(wtxt);
  auto [L0, L1] = hirota_lax(w, a, b);
  const PoissonPencil P = pencil_from_lax(L0, L1);
  const EFormTriple ef = eform(P);
  const WeylStructure W = hirota_weyl(w, a, b);
  const Mat3T<Expr> hrec = conformal_from_eforms(ef);

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> ul(-1.5, 1.5);
  const auto pts = sample_admissible_points(w, Chart::xyz(), to_vec3(c.box_lo),
                                            to_vec3(c.box_hi), c.points, c.seed);
  double pair_worst = 0.0, frob_worst = 0.0, ratio_worst = 0.0;
  for (const Vec3& q : pts) {
    const double lam = ul(rng);
    const double p5[5] = {q[0], q[1], q[2], 0.0, 0.0};
    const auto e = eform_at(ef, lam, p5);
    const Vec3 v0 = L0.eval(q, lam), v1 = L1.eval(q, lam);
    const double scale = std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]) + 1.0;
    double p0 = 0, p1 = 0;
    for (int i = 0; i < 3; ++i) {
      p0 += e[i] * v0[i];
      p1 += e[i] * v1[i];
    }
    pair_worst = std::max({pair_worst, std::abs(p0) / scale, std::abs(p1) / scale});
    frob_worst = std::max(frob_worst, eform_frobenius(ef, p5, lam) / scale);

    const Mat3 target = weyl_metric_at(W, q);
    Mat3 got;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) got[i][j] = eval_jet(hrec[i][j], ef.chart5, p5, 0).value();
    const double r0 = got[0][0] / target[0][0];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        ratio_worst = std::max(ratio_worst, std::abs(got[i][j] / target[i][j] - r0));
  }
  rep.add("eform_annihilates_lax", pair_worst, pair_tol);
  rep.add("frobenius_e_de", frob_worst, frob_tol);
  rep.add("conformal_ratio_spread", ratio_worst, ratio_tol);
  return finish(rep, c);
}

std::vector<std::string> args_from_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  is >> j;
  std::vector<std::string> args;
  args.push_back(j.at("command").get<std::string>());
  for (const auto& [k, v] : j.items()) {
    if (k == "command") continue;
    args.push_back("--" + k);
    if (v.is_string()) {
      args.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& e : v) args.push_back(e.dump());
    } else {
      args.push_back(v.dump());
    }
  }
  return args;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"construction and numerical certification of hyper-CR Einstein-Weyl "
               "structures, Veronese webs and their Poisson pencils"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON job config: {\"command\": ..., flags...}");

  CommonOpts common;
  std::string wtxt, Htxt, csv, family_path, ftxt, gtxt, solver_config, grid_out;
  double a = 1.0, b = 2.0, eps = 1.0, kappa = 2.0;
  double tol_ew = 1e-9, tol_ja = 1e-10, tol_lc = 1e-10, tol_ve = 1e-11, tol_jt = 1e-10;
  double tol_tr = 1e-10, tol_de = 1e-6, tol_hi = 1e-12;
  double pair_tol = 1e-10, frob_tol = 1e-10, ratio_tol = 1e-8, residual_tol = 1e30, y_cap = 10.0;
  int order = 4, steps = 64, n = 3;
  std::vector<double> lambdas{0.0, 1.0, -1.0, 3.0};
  std::vector<double> probe{1.0, 1.0, 1.0};
  std::vector<double> consts;

  CLI::App* ew = app.add_subcommand("verify-ew", "Einstein-Weyl residual of a scalar field");
  ew->add_option("--w", wtxt, "Hirota field w(x,y,z)");
  ew->add_option("--H", Htxt, "hyper-CR field H(X,Y,T)");
  ew->add_option("--a", a);
  ew->add_option("--b", b);
  ew->add_option("--tol", tol_ew);
  add_common(ew, common);

  CLI::App* ja = app.add_subcommand("verify-jacobi", "Jacobi identity of the Poisson pencil");
  ja->add_option("--w", wtxt)->required();
  ja->add_option("--a", a);
  ja->add_option("--b", b);
  ja->add_option("--lambda", lambdas, "pencil parameters to test");
  ja->add_option("--tol", tol_ja);
  ja->add_option("--probe", probe, "evaluation point reported in detail")->expected(3);
  ja->add_option("--csv", csv, "sweep output: lambda,x,y,z,maxJ");
  add_common(ja, common);

  CLI::App* lc = app.add_subcommand("lax-commutator", "structure of [L0, L1]");
  lc->add_option("--w", wtxt);
  lc->add_option("--H", Htxt);
  lc->add_option("--a", a);
  lc->add_option("--b", b);
  lc->add_option("--tol", tol_lc);
  lc->add_option("--csv", csv, "residual sweep: x,y,z,lambda,residual");
  add_common(lc, common);

  CLI::App* ve = app.add_subcommand("veronese-check", "nullity/orthogonality of the Veronese curve");
  ve->add_option("--w", wtxt)->required();
  ve->add_option("--a", a);
  ve->add_option("--b", b);
  ve->add_option("--tol", tol_ve);
  add_common(ve, common);

  CLI::App* jt = app.add_subcommand("jones-tod", "symmetry reduction against the closed form");
  jt->add_option("--w", wtxt)->required();
  jt->add_option("--a", a);
  jt->add_option("--b", b);
  jt->add_option("--tol", tol_jt);
  add_common(jt, common);

  CLI::App* sh = app.add_subcommand("solve-hypercr", "evolve the hyper-CR equation in Y");
  sh->add_option("--solver-config", solver_config, "solver JSON")->required();
  sh->add_option("--grid-out", grid_out, "solution volume CSV path");
  sh->add_option("--residual-tol", residual_tol, "pass threshold for the volume residual");
  sh->add_option("--y-cap", y_cap, "refuse |y_final| beyond this");
  add_common(sh, common);

  CLI::App* tr = app.add_subcommand("twistor-recursion", "series coefficients and wave checks");
  tr->add_option("--H", Htxt)->required();
  tr->add_option("--order", order, "highest psi index");
  tr->add_option("--tol", tol_tr);
  add_common(tr, common);

  CLI::App* de = app.add_subcommand("deform", "finite Kodaira deformation of a curve family");
  de->add_option("--family", family_path, "curve family JSON")->required();
  de->add_option("--f", ftxt, "degree-2 generator component");
  de->add_option("--g", gtxt, "degree-0 generator component");
  de->add_option("--eps", eps, "deformation parameter");
  de->add_option("--steps", steps);
  de->add_option("--tol", tol_de);
  add_common(de, common);

  CLI::App* he = app.add_subcommand("heisenberg", "the full Heisenberg-group example");
  he->add_option("--eps", eps);
  he->add_option("--a", a);
  he->add_option("--b", b);
  add_common(he, common);

  CLI::App* hi = app.add_subcommand("hierarchy-check", "pairwise hierarchy residuals");
  hi->add_option("--n", n);
  hi->add_option("--kappa", kappa);
  hi->add_option("--constants", consts, "hierarchy constants a_i");
  hi->add_option("--tol", tol_hi);
  add_common(hi, common);

  CLI::App* ef = app.add_subcommand("eform-check", "e-form chain from the pencil");
  ef->add_option("--w", wtxt)->required();
  ef->add_option("--a", a);
  ef->add_option("--b", b);
  ef->add_option("--pair-tol", pair_tol);
  ef->add_option("--frob-tol", frob_tol);
  ef->add_option("--ratio-tol", ratio_tol);
  add_common(ef, common);

  try {
    std::vector<std::string> argv = args;
    if (!argv.empty() && argv[0] == "--config") {
      if (argv.size() < 2) throw std::runtime_error("--config needs a path");
      argv = args_from_config(argv[1]);
    }
    // CLI11 parses reversed argv
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);

    if (ew->parsed()) {
      if (wtxt.empty() && Htxt.empty())
        throw CLI::ValidationError("verify-ew", "need --w or --H");
      return cmd_verify_ew(wtxt, Htxt, a, b, tol_ew, common);
    }
    if (ja->parsed()) return cmd_verify_jacobi(wtxt, a, b, lambdas, tol_ja, probe, csv, common);
    if (lc->parsed()) {
      if (wtxt.empty() && Htxt.empty())
        throw CLI::ValidationError("lax-commutator", "need --w or --H");
      return cmd_lax_commutator(wtxt, Htxt, a, b, tol_lc, csv, common);
    }
    if (ve->parsed()) return cmd_veronese(wtxt, a, b, tol_ve, common);
    if (jt->parsed()) return cmd_jones_tod(wtxt, a, b, tol_jt, common);
    if (sh->parsed()) return cmd_solve_hypercr(solver_config, grid_out, residual_tol, y_cap, common);
    if (tr->parsed()) return cmd_twistor_recursion(Htxt, order, tol_tr, common);
    if (de->parsed()) return cmd_deform(family_path, ftxt, gtxt, eps, steps, tol_de, common);
    if (he->parsed()) return cmd_heisenberg(eps, a, b, common);
    if (hi->parsed()) return cmd_hierarchy(n, kappa, consts, tol_hi, common);
    if (ef->parsed()) return cmd_eform(wtxt, a, b, pair_tol, frob_tol, ratio_tol, common);

    std::cerr << app.help() << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace veroweb
