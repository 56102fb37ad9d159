// hyplab: batch front end for the laboratory.
//
// Every command writes a CSV table (stdout, or --csv FILE) and, with
// --json FILE, a JSON summary of the run. Progress and diagnostics go to
// stderr. Exit status: 0 success, 2 configuration error, 3 quadrature
// non-convergence, 4 a requested check failed.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyplab/covering.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/geometry.hpp"
#include "hyplab/heatkernel.hpp"
#include "hyplab/observability.hpp"
#include "hyplab/parallel.hpp"
#include "hyplab/regions.hpp"
#include "hyplab/simd/kernels.hpp"
#include "hyplab/spectral.hpp"

namespace {

using hyplab::HalfPlanePoint;
using hyplab::QuadratureSpec;
using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kNonConvergence = 3, kAssertion = 4 };

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One CSV table plus the JSON summary of a run.
struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  Json summary = Json::object();
  bool assertion_failed = false;
  std::string assertion_message;

  void row(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }
  void fail(const std::string& why) {
    if (!assertion_failed) assertion_message = why;
    assertion_failed = true;
  }
};

struct Common {
  std::string csv_path;
  std::string json_path;
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double tail_tol = 1e-14;
  int max_subdivisions = 4000;
  std::uint64_t seed = 1;

  QuadratureSpec spec() const {
    QuadratureSpec s;
    s.rel_tol = rel_tol;
    s.abs_tol = abs_tol;
    s.tail_tol = tail_tol;
    s.max_subdivisions = max_subdivisions;
    s.validate();
    return s;
  }
};

void write_csv(std::ostream& out, const Report& r) {
  for (std::size_t i = 0; i < r.header.size(); ++i) out << (i ? "," : "") << r.header[i];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

HalfPlanePoint parse_point(const std::vector<double>& v, const char* what) {
  if (v.size() != 2) throw hyplab::ConfigError(std::string(what) + " needs two values x,y");
  if (!(v[1] > 0.0)) throw hyplab::ConfigError(std::string(what) + " needs y > 0");
  return {v[0], v[1]};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hyplab::ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json point_json(const HalfPlanePoint& z) { return Json::array({z.x(), z.y()}); }

// ---------------------------------------------------------------- kernel

struct KernelEvalArgs {
  std::vector<double> t, d;
};

void kernel_eval(const KernelEvalArgs& a, const QuadratureSpec& spec, Report& r) {
  r.header = {"t", "d", "H", "error", "converged"};
  std::vector<hyplab::QuadResult> res(a.t.size() * a.d.size());
  hyplab::parallel_for(res.size(), [&](std::size_t i) {
    res[i] = hyplab::heat_kernel_result(hyplab::KernelQuery(a.t[i / a.d.size()], a.d[i % a.d.size()]), spec);
  });
  bool all = true;
  for (std::size_t i = 0; i < res.size(); ++i) {
    r.row({num(a.t[i / a.d.size()]), num(a.d[i % a.d.size()]), num(res[i].value), num(res[i].error),
           res[i].converged ? "1" : "0"});
    all = all && res[i].converged;
  }
  r.summary["points"] = res.size();
  r.summary["all_converged"] = all;
  if (!all) throw hyplab::NonConvergence("kernel-eval: some values missed the tolerance", 0.0, 0.0);
}

struct KernelCheckArgs {
  std::vector<double> t;
  bool mass = false;
  double split = 0.0;
  double tol = 1e-6;
};

void kernel_check(const KernelCheckArgs& a, const QuadratureSpec& spec, Report& r) {
  r.header = {"check", "t", "s", "value", "target", "residual", "error"};
  double worst = 0.0;
  for (double t : a.t) {
    if (a.mass) {
      const hyplab::QuadResult m = hyplab::kernel_mass(t, spec);
      const double res = std::abs(m.value - 1.0);
      worst = std::max(worst, res);
      r.row({"mass", num(t), "", num(m.value), "1", num(res), num(m.error)});
    }
    if (a.split > 0.0) {
      if (!(a.split < t)) throw hyplab::ConfigError("--semigroup split must be below every t");
      const HalfPlanePoint pairs[][2] = {{{0.0, 1.0}, {0.5, 1.5}}, {{0.0, 1.0}, {2.0, 0.5}}, {{-1.0, 3.0}, {1.0, 3.0}}};
      for (const auto& p : pairs) {
        const hyplab::SemigroupReport s = hyplab::semigroup_check(t, a.split, p[0], p[1], spec);
        worst = std::max(worst, s.relative);
        r.row({"semigroup", num(t), num(a.split), num(s.convolved), num(s.direct), num(s.relative),
               num(s.quad_error)});
      }
    }
  }
  r.summary["max_residual"] = worst;
  r.summary["tolerance"] = a.tol;
  if (worst > a.tol) r.fail("kernel-check residual " + num(worst) + " exceeds " + num(a.tol));
}

// ------------------------------------------------------------- thickness

struct ThicknessArgs {
  std::string region;
  double R = 1.0;
  double delta = 0.1;
  std::vector<double> window;
  double step = 0.5;
  int mc_samples = 0;
  bool require = false;
};

void thickness(const ThicknessArgs& a, const Common& c, Report& r) {
  if (a.window.size() != 4) throw hyplab::ConfigError("--window needs x_min,x_max,y_min,y_max");
  const hyplab::Region region = hyplab::load_region(a.region);
  const hyplab::ScanWindow w{a.window[0], a.window[1], a.window[2], a.window[3]};
  const QuadratureSpec spec = c.spec();
  const hyplab::ThicknessCertificate cert = hyplab::thickness_scan(region, a.R, w, a.step, a.delta, spec);
  const bool certified = cert.mode == hyplab::ThicknessCertificate::Mode::CertifiedOnGrid;
  r.header = {"mode", "R", "delta", "nodes", "failed_nodes", "min_mass", "argmin_x", "argmin_y", "witness_x",
              "witness_y", "witness_mass"};
  r.row({certified ? "certified_on_grid" : "refuted", num(cert.R), num(cert.delta), std::to_string(cert.nodes),
         std::to_string(cert.failed_nodes), num(cert.min_mass), num(cert.argmin.x()), num(cert.argmin.y()),
         cert.witness ? num(cert.witness->x()) : "", cert.witness ? num(cert.witness->y()) : "",
         cert.witness ? num(cert.witness_mass) : ""});
  r.summary["mode"] = certified ? "certified_on_grid" : "refuted";
  r.summary["grid"] = cert.grid;
  r.summary["min_mass"] = cert.min_mass;
  r.summary["argmin"] = point_json(cert.argmin);
  r.summary["mass_rel_tol"] = spec.rel_tol;
  if (cert.witness) r.summary["witness"] = point_json(*cert.witness);
  if (a.mc_samples > 0) {
    const hyplab::MonteCarloResult mc =
        hyplab::ball_mass_monte_carlo(region, hyplab::GeodesicBall(cert.argmin, a.R), a.mc_samples, c.seed);
    r.summary["monte_carlo_min_mass"] = {{"value", mc.value}, {"std_error", mc.std_error}, {"samples", mc.samples}};
  }
  if (a.require && !certified) r.fail("thickness refuted");
}

// ----------------------------------------------------------------- cover

struct CoverArgs {
  double Rp = 1.0;
  int j_min = -2, j_max = 2;
  long k_min = -3, k_max = 3;
  std::vector<double> point;
};

void cover(const CoverArgs& a, Report& r) {
  if (!(a.Rp > 0.0)) throw hyplab::ConfigError("--Rp must be positive");
  if (!a.point.empty()) {
    const HalfPlanePoint z = parse_point(a.point, "--point");
    const auto found = hyplab::locate(z, a.Rp);
    r.header = {"j", "k", "x0", "x1", "y0", "y1"};
    for (const auto& d : found) {
      const auto e = hyplab::rect_extents(d);
      r.row({std::to_string(d.j), std::to_string(d.k), num(e.x.lo), num(e.x.hi), num(e.y.lo), num(e.y.hi)});
    }
    r.summary["multiplicity"] = found.size();
    r.summary["bound"] = hyplab::multiplicity_bound(a.Rp);
    if (found.empty()) r.fail("point not covered");
    if (static_cast<int>(found.size()) > hyplab::multiplicity_bound(a.Rp)) r.fail("multiplicity bound exceeded");
    return;
  }
  r.header = {"j", "k", "x0", "x1", "y0", "y1", "ball_x", "ball_y", "ball_radius", "containment"};
  const double R = hyplab::inscribed_radius(a.Rp);
  int proved = 0, refuted = 0, undecided = 0;
  for (int j = a.j_min; j <= a.j_max; ++j)
    for (long k = a.k_min; k <= a.k_max; ++k) {
      const hyplab::DyadicRectangle d{j, k, a.Rp};
      const auto e = hyplab::rect_extents(d);
      const auto b = hyplab::inscribed_ball(d);
      const auto c = hyplab::inscribed_ball_contained(d);
      const char* s = c == hyplab::Containment::Proved ? "proved"
                      : c == hyplab::Containment::Refuted ? "refuted"
                                                          : "undecided";
      proved += c == hyplab::Containment::Proved;
      refuted += c == hyplab::Containment::Refuted;
      undecided += c == hyplab::Containment::Undecided;
      r.row({std::to_string(j), std::to_string(k), num(e.x.lo), num(e.x.hi), num(e.y.lo), num(e.y.hi),
             num(b.center().x()), num(b.center().y()), num(b.radius()), s});
    }
  r.summary["inscribed_radius"] = R;
  r.summary["proved"] = proved;
  r.summary["refuted"] = refuted;
  r.summary["undecided"] = undecided;
  if (refuted > 0) r.fail("an inscribed ball is not contained");
}

// -------------------------------------------------------------- spectral

struct StateArgs {
  std::string coeffs;
  double t = 0.5;
  std::vector<double> center{0.0, 1.0};
  double s_max = 8.0;
  int nodes = 512;

  hyplab::SpectralCoefficients load() const {
    if (!coeffs.empty()) return hyplab::coefficients_from_json(read_file(coeffs));
    if (!(t > 0.0)) throw hyplab::ConfigError("--t must be positive");
    return hyplab::heat_coefficients(t, hyplab::SGrid::uniform(s_max, nodes), parse_point(center, "--center"));
  }
};

void add_state_options(CLI::App* app, StateArgs& s) {
  app->add_option("--coeffs", s.coeffs, "Coefficient file (JSON); default is a heat-kernel launch");
  app->add_option("--t", s.t, "Heat launch time of the default state");
  app->add_option("--center", s.center, "Base point x,y of the default state")->delimiter(',')->expected(2);
  app->add_option("--s-max", s.s_max, "Spectral cutoff of the default grid");
  app->add_option("--nodes", s.nodes, "Nodes of the default grid");
}

struct ProjectArgs {
  StateArgs state;
  double Lambda = 2.0;
  std::string out;
};

void project(const ProjectArgs& a, Report& r) {
  const hyplab::SpectralCoefficients c = a.state.load();
  const hyplab::SpectralCoefficients p = hyplab::project(c, a.Lambda);
  r.header = {"s", "lambda", "before", "after"};
  for (std::size_t k = 0; k < c.grid.size(); ++k)
    r.row({num(c.grid.s[k]), num(hyplab::spectral_lambda(c.grid.s[k])), num(c.values[k]), num(p.values[k])});
  const double n0 = hyplab::parseval_norm_sq(c), n1 = hyplab::parseval_norm_sq(p);
  r.summary["Lambda"] = a.Lambda;
  r.summary["norm_sq_before"] = n0;
  r.summary["norm_sq_after"] = n1;
  r.summary["lambda_eff"] = p.lambda_eff();
  r.summary["tail_ratio"] = c.tail_ratio();
  r.summary["quadrature_error"] = c.max_error();
  if (n1 > n0 * (1.0 + 1e-12)) r.fail("projection increased the norm");
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw hyplab::ConfigError("cannot write " + a.out);
    f << hyplab::coefficients_to_json(p) << '\n';
  }
}

struct RatioArgs {
  StateArgs state;
  std::string region;
  std::vector<double> Lambda{1.0, 2.0, 4.0, 8.0};
  double r_cut = 8.0;
  bool slepian = false;
};

void estimate_ratio(const RatioArgs& a, Report& r) {
  const hyplab::Region region = hyplab::load_region(a.region);
  const hyplab::SpectralCoefficients c = a.state.load();
  const hyplab::OccupancyTable table = hyplab::occupancy_table(region, c.base, a.r_cut);
  r.header = {"Lambda", "lower", "upper", "value", "neg_log_value"};
  if (a.slepian) r.header.push_back("slepian_min");
  Json rows = Json::array();
  for (double L : a.Lambda) {
    const hyplab::SpectralCoefficients p = hyplab::project(c, L);
    const hyplab::RatioEstimate e = hyplab::table_ratio(table, p);
    std::vector<std::string> row{num(L), num(e.lower), num(e.upper), num(e.value), num(-std::log(e.value))};
    if (a.slepian) row.push_back(num(hyplab::slepian_min_ratio(table, L).ratio));
    r.rows.push_back(row);
    rows.push_back({{"Lambda", L}, {"lower", e.lower}, {"upper", e.upper}, {"value", e.value}});
  }
  r.summary["center"] = point_json(c.base);
  r.summary["r_cut"] = a.r_cut;
  r.summary["estimates"] = rows;
  r.summary["coefficient_error"] = c.max_error();
}

struct LiftArgs {
  StateArgs state;
  double Lambda = 2.0;
  int n = 20;
  double h = 1e-3;
  double t_max = 1.0;
  double half_width = 1.0;
  double tol = 1e-4;
};

void harmonic_lift(const LiftArgs& a, Report& r) {
  const hyplab::BandlimitedFunction u(a.state.load());
  const HalfPlanePoint z = u.components().front().coeffs.base;
  const double y0 = z.y() * std::exp(-a.half_width), y1 = z.y() * std::exp(a.half_width);
  const double x0 = z.x() - a.half_width * z.y(), x1 = z.x() + a.half_width * z.y();
  const hyplab::LiftResidual res =
      hyplab::harmonic_lift_residual(u, a.Lambda, 0.1, a.t_max, x0, x1, y0, y1, a.n, a.h);
  r.header = {"Lambda", "points", "max_residual", "max_abs", "relative", "initial_error", "initial_max"};
  const double rel = res.max_abs > 0.0 ? res.max_residual / res.max_abs : 0.0;
  r.row({num(a.Lambda), std::to_string(res.points), num(res.max_residual), num(res.max_abs), num(rel),
         num(res.max_initial_error), num(res.max_initial)});
  r.summary["relative_residual"] = rel;
  r.summary["tolerance"] = a.tol;
  r.summary["fd_step"] = a.h;
  if (rel > a.tol) r.fail("lift residual " + num(rel) + " exceeds " + num(a.tol));
}

// --------------------------------------------------------- observability

struct ObsArgs {
  hyplab::ObservabilityInputs in;
  bool optimize = false;
  double eta = 0.0;
};

void obs_constant(const ObsArgs& a, Report& r) {
  hyplab::ObservabilityInputs in = a.in;
  in.validate();
  if (a.optimize) {
    const hyplab::LambdaSearchResult best = hyplab::optimize_lambda(in);
    r.summary["lambda_search"] = {{"lambda", best.lambda}, {"log_C_obs", best.log_C_obs}};
    in.lambda = best.lambda;
  }
  const hyplab::ObservabilityAudit audit = hyplab::observability_audit(in);
  r.header = {"m", "l_m", "l_m1", "l_m2", "epsilon", "log_weight", "identity_residual_1", "identity_residual_2",
              "exponent_residual", "log_inequality", "exponent_bound"};
  for (const auto& s : audit.steps)
    r.row({std::to_string(s.m), num(s.l_m), num(s.l_m1), num(s.l_m2), num(s.epsilon), num(s.log_weight),
           num(s.identity_residual_1), num(s.identity_residual_2), num(s.exponent_residual),
           s.log_inequality ? "1" : "0", s.exponent_bound ? "1" : "0"});
  r.summary["inputs"] = {{"K", in.K}, {"C_tilde", in.C_tilde}, {"T", in.T}, {"lambda", in.lambda}};
  r.summary["mu"] = audit.constants.mu;
  r.summary["C_prime"] = audit.constants.C_prime;
  r.summary["log_C_obs"] = audit.log_C_obs;
  r.summary["C_obs"] = std::exp(audit.log_C_obs);
  r.summary["implied_C_tilde"] = hyplab::implied_hoelder_constant(in.K, in.T);
  r.summary["max_identity_residual"] = audit.max_identity_residual;
  r.summary["max_exponent_residual"] = audit.max_exponent_residual;
  if (a.eta > 0.0) {
    const double L = hyplab::hoelder_lambda(in.K, in.T, a.eta);
    r.summary["eta"] = a.eta;
    r.summary["Lambda"] = L;
    r.summary["Lambda_bound"] = hyplab::hoelder_lambda_bound(in.K, in.T, a.eta);
    r.summary["root_residual"] = std::abs(in.K * L - in.T * L * L - std::log(a.eta));
  }
  if (!audit.all_inequalities) r.fail("a telescoping inequality failed");
  if (audit.max_identity_residual > 1e-12 || audit.max_exponent_residual > 1e-12)
    r.fail("telescoping identities off by more than 1e-12");
}

struct NecessaryArgs {
  std::string region;
  double log_C_obs = 42.0;
  std::vector<std::vector<double>> centers;
  double L_step = 0.25;
  double L_max = 60.0;
  bool no_verify = false;
  double spread_tol = 0.01;
};

void necessary_condition(const NecessaryArgs& a, const QuadratureSpec& spec, Report& r) {
  const hyplab::Region region = hyplab::load_region(a.region);
  hyplab::ExtractionOptions opt;
  if (!a.centers.empty()) {
    opt.centers.clear();
    for (const auto& c : a.centers) opt.centers.push_back(parse_point(c, "--center"));
  }
  opt.L_step = a.L_step;
  opt.L_max = a.L_max;
  opt.verify = !a.no_verify;
  std::cerr << "hyplab: fitting Gaussian constants\n";
  const hyplab::GaussianConstants g = hyplab::fit_gaussian_constants(spec);
  const hyplab::ThicknessExtraction x = hyplab::necessary_condition_experiment(region, std::exp(a.log_C_obs), g, opt);
  r.header = {"x0", "y0", "lower_integral", "tail_integral", "C_doubleprime", "L", "delta", "obs_lhs", "obs_omega",
              "obs_holds", "ball_mass", "mass_radius", "mass_holds"};
  for (const auto& c : x.centers)
    r.row({num(c.z0.x()), num(c.z0.y()), num(c.lower_integral), num(c.tail_integral), num(c.C_doubleprime),
           num(c.L), num(c.delta), num(c.obs_lhs), num(c.obs_omega), c.obs_holds ? "1" : "0", num(c.ball_mass),
           num(c.mass_radius), c.mass_holds ? "1" : "0"});
  r.summary["gaussian"] = {{"alpha", g.alpha},     {"beta", g.beta},
                           {"K", g.K},             {"gamma", g.gamma},
                           {"C_low", g.C_low},     {"fit_violation", g.fit_violation},
                           {"validation_violation", g.validation_violation}};
  r.summary["log_C_obs"] = a.log_C_obs;
  r.summary["L"] = x.L;
  r.summary["delta"] = x.delta;
  r.summary["C_doubleprime"] = x.C_doubleprime;
  r.summary["C_doubleprime_spread"] = x.C_doubleprime_spread;
  r.summary["L_spread"] = x.L_spread;
  r.summary["integral_rel_tol"] = opt.spec.rel_tol;
  if (x.C_doubleprime_spread > a.spread_tol || x.L_spread > a.spread_tol) r.fail("extraction depends on z0");
  if (opt.verify)
    for (const auto& c : x.centers)
      if (!c.obs_holds || !c.mass_holds) r.fail("observability or mass check failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyplab: heat-kernel, spectral and observability experiments on the hyperbolic plane"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--csv", common.csv_path, "Write the table here instead of stdout");
  app.add_option("--json", common.json_path, "Write the JSON summary here");
  app.add_option("--rel-tol", common.rel_tol, "Quadrature relative tolerance");
  app.add_option("--abs-tol", common.abs_tol, "Quadrature absolute tolerance");
  app.add_option("--tail-tol", common.tail_tol, "Tail truncation tolerance");
  app.add_option("--max-subdivisions", common.max_subdivisions, "Adaptive subdivision limit");
  app.add_option("--seed", common.seed, "Seed for stochastic paths");

  KernelEvalArgs ke;
  auto* c_ke = app.add_subcommand("kernel-eval", "Tabulate H(t, d)");
  c_ke->add_option("--t", ke.t)->required()->delimiter(',');
  c_ke->add_option("--d", ke.d)->required()->delimiter(',');

  KernelCheckArgs kc;
  auto* c_kc = app.add_subcommand("kernel-check", "Mass and semigroup checks of the heat kernel");
  c_kc->add_option("--t", kc.t)->required()->delimiter(',');
  c_kc->add_flag("--mass", kc.mass, "Check that H(t, .) has unit mass");
  c_kc->add_option("--semigroup", kc.split, "Check H(t) = H(s) * H(t - s) at this s");
  c_kc->add_option("--tol", kc.tol, "Largest acceptable residual");

  ThicknessArgs th;
  auto* c_th = app.add_subcommand("thickness", "Certify or refute thickness of a region on a grid");
  c_th->add_option("--region", th.region)->required();
  c_th->add_option("--R", th.R);
  c_th->add_option("--delta", th.delta);
  c_th->add_option("--window", th.window, "x_min,x_max,y_min,y_max")->required()->delimiter(',')->expected(4);
  c_th->add_option("--step", th.step, "Grid step in log y and x/y");
  c_th->add_option("--mc-samples", th.mc_samples, "Monte-Carlo cross-check at the minimum");
  c_th->add_flag("--require", th.require, "Exit 4 unless certified");

  CoverArgs cv;
  auto* c_cv = app.add_subcommand("cover", "Dyadic rectangles and inscribed balls");
  c_cv->add_option("--Rp", cv.Rp);
  c_cv->add_option("--j-min", cv.j_min);
  c_cv->add_option("--j-max", cv.j_max);
  c_cv->add_option("--k-min", cv.k_min);
  c_cv->add_option("--k-max", cv.k_max);
  c_cv->add_option("--point", cv.point, "List the rectangles containing x,y")->delimiter(',')->expected(2);

  ProjectArgs pr;
  auto* c_pr = app.add_subcommand("project", "Apply the spectral projector to radial coefficients");
  add_state_options(c_pr, pr.state);
  c_pr->add_option("--Lambda", pr.Lambda)->required();
  c_pr->add_option("--out-coeffs", pr.out, "Write the projected coefficients here");

  RatioArgs ra;
  auto* c_ra = app.add_subcommand("estimate-ratio", "Fraction of ||Pi_Lambda u||^2 carried by omega");
  add_state_options(c_ra, ra.state);
  c_ra->add_option("--region", ra.region)->required();
  c_ra->add_option("--Lambda", ra.Lambda)->delimiter(',');
  c_ra->add_option("--r-cut", ra.r_cut);
  c_ra->add_flag("--slepian", ra.slepian, "Also report the minimal ratio over radial band-limited functions");

  LiftArgs hl;
  auto* c_hl = app.add_subcommand("harmonic-lift", "PDE residual of the harmonic lift");
  add_state_options(c_hl, hl.state);
  c_hl->add_option("--Lambda", hl.Lambda);
  c_hl->add_option("--n", hl.n, "Grid points per axis");
  c_hl->add_option("--fd-step", hl.h, "Finite-difference step, relative to y");
  c_hl->add_option("--t-max", hl.t_max);
  c_hl->add_option("--tol", hl.tol);

  ObsArgs ob;
  auto* c_ob = app.add_subcommand("obs-constant", "Observability constant with its telescoping audit");
  c_ob->add_option("--K", ob.in.K);
  c_ob->add_option("--Ctilde", ob.in.C_tilde);
  c_ob->add_option("--T", ob.in.T);
  c_ob->add_option("--lambda", ob.in.lambda);
  c_ob->add_flag("--optimize", ob.optimize, "Minimise over lambda");
  c_ob->add_option("--eta", ob.eta, "Also solve for the Hoelder frequency at this eta");

  NecessaryArgs nc;
  auto* c_nc = app.add_subcommand("necessary-condition", "Extract (L, delta) from an observability constant");
  c_nc->add_option("--region", nc.region)->required();
  c_nc->add_option("--log-Cobs", nc.log_C_obs, "Natural log of C_obs");
  c_nc->add_option("--center", nc.centers, "Repeatable base point x,y")->delimiter(',')->expected(2)->allow_extra_args(false);
  c_nc->add_option("--L-step", nc.L_step);
  c_nc->add_option("--L-max", nc.L_max);
  c_nc->add_flag("--no-verify", nc.no_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  Report report;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const QuadratureSpec spec = common.spec();
    std::cerr << "hyplab: " << command << " with " << hyplab::worker_count() << " worker(s), "
              << hyplab::simd::active().name << " kernels\n";
    if (*c_ke) kernel_eval(ke, spec, report);
    else if (*c_kc) kernel_check(kc, spec, report);
    else if (*c_th) thickness(th, common, report);
    else if (*c_cv) cover(cv, report);
    else if (*c_pr) project(pr, report);
    else if (*c_ra) estimate_ratio(ra, report);
    else if (*c_hl) harmonic_lift(hl, report);
    else if (*c_ob) obs_constant(ob, report);
    else if (*c_nc) necessary_condition(nc, spec, report);
  } catch (const hyplab::ConfigError& e) {
    std::cerr << "hyplab: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const hyplab::InvalidArgument& e) {
    std::cerr << "hyplab: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const hyplab::NonConvergence& e) {
    std::cerr << "hyplab: non-convergence: " << e.what() << " (estimate " << e.estimate() << ", error "
              << e.error() << ")\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "hyplab: internal error: " << e.what() << '\n';
    return kInternal;
  }

  Json summary;
  summary["command"] = command;
  summary["seed"] = common.seed;
  summary["quadrature"] = {{"rel_tol", common.rel_tol},
                           {"abs_tol", common.abs_tol},
                           {"tail_tol", common.tail_tol},
                           {"max_subdivisions", common.max_subdivisions}};
  summary["results"] = report.summary;
  summary["passed"] = !report.assertion_failed;

  if (common.csv_path.empty()) {
    write_csv(std::cout, report);
  } else {
    std::ofstream f(common.csv_path);
    if (!f) {
      std::cerr << "hyplab: config error: cannot write " << common.csv_path << '\n';
      return kConfig;
    }
    write_csv(f, report);
  }
  if (!common.json_path.empty()) {
    std::ofstream f(common.json_path);
    if (!f) {
      std::cerr << "hyplab: config error: cannot write " << common.json_path << '\n';
      return kConfig;
    }
    f << summary.dump(2) << '\n';
  }
  if (report.assertion_failed) {
    std::cerr << "hyplab: check failed: " << report.assertion_message << '\n';
    return kAssertion;
  }
  return kOk;
}
