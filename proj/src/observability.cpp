#include "hyplab/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hyplab/errors.hpp"
#include "hyplab/parallel.hpp"
#include "hyplab/regions.hpp"

namespace hyplab {

namespace {

const double kLambdaMin = 1.0 / std::numbers::sqrt2;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive and finite");
}

void require_lambda(double lambda) {
  if (!(lambda > kLambdaMin && lambda < 1.0))
    throw InvalidArgument("lambda must lie in (1/sqrt(2), 1), got " + std::to_string(lambda));
}

}  // namespace

void ObservabilityInputs::validate() const {
  require_positive(K, "K");
  require_positive(C_tilde, "C_tilde");
  require_positive(T, "T");
  require_lambda(lambda);
}

double hoelder_lambda(double K, double T, double eta) {
  require_positive(K, "K");
  require_positive(T, "T");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  return (K + std::sqrt(K * K - 4.0 * T * std::log(eta))) / (2.0 * T);
}

double hoelder_lambda_bound(double K, double T, double eta) {
  require_positive(K, "K");
  require_positive(T, "T");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  return (K + std::sqrt(-T * std::log(eta))) / T;
}

double implied_hoelder_constant(double K, double T) {
  require_positive(K, "K");
  require_positive(T, "T");
  const double a = 1.5 * K * K / T;
  // log(1 + e^a) without overflow.
  const double log1pexp = a > 30.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
  return std::max(0.0, (std::log(6.0 * K) + log1pexp) / (1.0 + 1.0 / T));
}

TelescopingConstants telescoping_constants(double lambda, double C_tilde) {
  require_lambda(lambda);
  require_positive(C_tilde, "C_tilde");
  TelescopingConstants c;
  c.mu = 1.0 / (2.0 - 1.0 / (lambda * lambda));
  c.C_prime = 1.0 + lambda + 2.0 * C_tilde * (1.0 + lambda) / lambda;
  return c;
}

double observability_log_constant(const ObservabilityInputs& inp) {
  inp.validate();
  const TelescopingConstants c = telescoping_constants(inp.lambda, inp.C_tilde);
  return 2.0 * inp.C_tilde + c.mu * c.C_prime / (inp.T * (1.0 - inp.lambda * inp.lambda));
}

double observability_constant(const ObservabilityInputs& inp) { return std::exp(observability_log_constant(inp)); }

LambdaSearchResult optimize_lambda(const ObservabilityInputs& inp, int steps) {
  if (steps < 2) throw InvalidArgument("lambda search needs at least 2 steps");
  const double lo = kLambdaMin + 1e-3;
  const double hi = 1.0 - 1e-3;
  LambdaSearchResult best{0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < steps; ++i) {
    ObservabilityInputs trial = inp;
    trial.lambda = lo + (hi - lo) * i / (steps - 1);
    const double v = observability_log_constant(trial);
    if (v < best.log_C_obs) best = {trial.lambda, v};
  }
  return best;
}

ObservabilityAudit observability_audit(const ObservabilityInputs& inp, int max_m) {
  ObservabilityAudit a;
  a.inputs = inp;
  a.log_C_obs = observability_log_constant(inp);
  a.constants = telescoping_constants(inp.lambda, inp.C_tilde);
  const double lam = inp.lambda;
  const double mu = a.constants.mu;
  const double Cp = a.constants.C_prime;
  auto l = [&](int m) { return std::pow(lam, m - 1) * inp.T; };

  double last = 0.0;
  for (int m = 1; m <= max_m; m += 2) {
    TelescopingStep s;
    s.m = m;
    s.l_m = l(m);
    s.l_m1 = l(m + 1);
    s.l_m2 = l(m + 2);
    s.l_m4 = l(m + 4);
    const double D = s.l_m - s.l_m2;
    if (!(D > 0.0) || !(s.l_m4 > 0.0)) break;
    s.epsilon = std::exp(-(mu - 1.0) * Cp / D);
    s.log_weight = -mu * Cp / D;
    s.weight = std::exp(s.log_weight);
    s.identity_residual_1 = std::abs((s.l_m - s.l_m1) - D / (1.0 + lam));
    s.identity_residual_2 = std::abs((s.l_m1 - s.l_m2) - lam * D / (1.0 + lam));
    const double e1 = (2.0 * mu - 1.0) / D;
    const double e2 = mu / (s.l_m2 - s.l_m4);
    s.exponent_residual = std::abs(e1 - e2) / std::abs(e2);
    const double gap = s.l_m - s.l_m1;
    s.log_inequality = gap >= std::exp(-1.0 / gap);
    const double lhs_exp = 2.0 * inp.C_tilde * (1.0 + 1.0 / (s.l_m1 - s.l_m2)) - std::log(gap);
    const double rhs_exp = 2.0 * inp.C_tilde + Cp / D;
    s.exponent_bound = lhs_exp <= rhs_exp * (1.0 + 1e-12);

    last = std::exp(-mu * Cp / (s.l_m2 - s.l_m4));
    a.max_identity_residual = std::max({a.max_identity_residual, s.identity_residual_1 / inp.T,
                                        s.identity_residual_2 / inp.T});
    a.max_exponent_residual = std::max(a.max_exponent_residual, s.exponent_residual);
    a.all_inequalities = a.all_inequalities && s.log_inequality && s.exponent_bound;
    a.telescoped += s.weight - last;
    a.steps.push_back(s);
    if (s.weight == 0.0 && last == 0.0) break;
  }
  return a;
}

SpectralCoefficients evolve_coefficients(const SpectralCoefficients& c, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("evolution time must be >= 0");
  SpectralCoefficients out = c;
  out.errors.clear();
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double s = c.grid.s[k];
    out.values[k] *= std::exp(-t * (s * s + 0.25));
  }
  if (!c.errors.empty()) {
    out.errors = c.errors;
    for (std::size_t k = 0; k < out.errors.size(); ++k) {
      const double s = c.grid.s[k];
      out.errors[k] *= std::exp(-t * (s * s + 0.25));
    }
  }
  return out;
}

namespace {

struct StateNorms {
  double total = 0.0;
  double omega = 0.0;
  double omega_upper = 0.0;
};

StateNorms state_norms(const SpectralCoefficients& c, const OccupancyTable& table) {
  const RatioEstimate r = table_ratio(table, c);
  return {r.denominator, r.lower * r.denominator, r.upper * r.denominator};
}

}  // namespace

HoelderReport hoelder_check(const SpectralCoefficients& u0, const OccupancyTable& table, double T,
                            double C_tilde) {
  require_positive(T, "T");
  if (!(C_tilde >= 0.0)) throw InvalidArgument("C_tilde must be >= 0");
  const double n0 = parseval_norm_sq(u0);
  if (!(n0 > 0.0)) throw InvalidArgument("hoelder_check: zero initial state");
  const StateNorms nT = state_norms(evolve_coefficients(u0, T), table);
  HoelderReport r;
  r.lhs = nT.total;
  r.omega_norm_sq = nT.omega;
  r.omega_upper = nT.omega_upper;
  r.initial_norm_sq = n0;
  const double geo = std::sqrt(nT.omega * n0);
  r.rhs = std::exp(C_tilde * (1.0 + 1.0 / T)) * geo;
  r.required_C_tilde =
      geo > 0.0 ? std::max(0.0, std::log(r.lhs / geo) / (1.0 + 1.0 / T)) : std::numeric_limits<double>::infinity();
  r.holds = r.lhs <= r.rhs;
  return r;
}

TranslatedReport translated_check(const SpectralCoefficients& u0, const OccupancyTable& table, double t1,
                                  double t2, double eps, double C_tilde) {
  if (!(t1 >= 0.0 && t2 > t1)) throw InvalidArgument("translated_check needs 0 <= t1 < t2");
  require_positive(eps, "eps");
  if (!(parseval_norm_sq(u0) > 0.0)) throw InvalidArgument("translated_check: zero initial state");
  const StateNorms n2 = state_norms(evolve_coefficients(u0, t2), table);
  const double n1 = parseval_norm_sq(evolve_coefficients(u0, t1));
  TranslatedReport r;
  r.lhs = n2.total;
  r.rhs = std::exp(2.0 * C_tilde * (1.0 + 1.0 / (t2 - t1))) * n2.omega / eps + eps * n1;
  r.holds = r.lhs <= r.rhs;
  return r;
}

GaussianConstants fit_gaussian_constants(const QuadratureSpec& spec) {
  std::vector<double> t_grid, d_grid, lower_grid;
  for (int i = 0; i <= 4; ++i) t_grid.push_back(1.0 + 0.25 * i);
  for (int i = 0; i <= 16; ++i) d_grid.push_back(0.5 * i);
  for (int i = 0; i <= 24; ++i) lower_grid.push_back(0.25 * i);

  const GaussianFit fit = gaussian_upper_fit(t_grid, d_grid, spec);
  GaussianConstants g;
  g.alpha = fit.alpha;
  g.K = fit.K;
  g.gamma = fit.gamma;
  g.fit_violation = fit.max_violation;
  g.validation_violation = gaussian_fit_violation(fit, refine_grid(t_grid), refine_grid(d_grid), spec);
  std::vector<double> ratio(lower_grid.size());
  parallel_for(lower_grid.size(), [&](std::size_t i) {
    const double d = lower_grid[i];
    ratio[i] = heat_kernel(KernelQuery(2.0, d), spec) * std::exp(g.beta * d * d);
  });
  g.C_low = *std::min_element(ratio.begin(), ratio.end());
  return g;
}

namespace {

// Smallest L on the grid with e^{-alpha L^2/2} tail < target.
double smallest_L(double alpha, double tail, double target, double step, double L_max) {
  for (int k = 0;; ++k) {
    const double L = k * step;
    if (L > L_max + 1e-12) break;
    if (std::exp(-0.5 * alpha * L * L) * tail < target) return L;
  }
  throw NonConvergence("no L <= " + std::to_string(L_max) + " meets the tail condition", L_max, 0.0);
}

}  // namespace

ThicknessExtraction necessary_condition_experiment(const Region& region, double C_obs,
                                                   const GaussianConstants& g, const ExtractionOptions& opt) {
  require_positive(C_obs, "C_obs");
  require_positive(g.alpha, "alpha");
  require_positive(g.beta, "beta");
  require_positive(g.K, "K");
  require_positive(g.gamma, "gamma");
  require_positive(g.C_low, "C_low");
  if (opt.centers.empty()) throw InvalidArgument("extraction needs at least one centre");
  require_positive(opt.L_step, "L_step");

  const double f_gamma_sq = std::exp(0.5 * g.gamma) * g.gamma * g.gamma * g.gamma;
  const double prefactor = g.C_low * g.C_low * f_gamma_sq / (C_obs * g.K * g.K * g.gamma);

  ThicknessExtraction out;
  out.alpha = g.alpha;
  out.beta = g.beta;
  out.C_obs = C_obs;
  out.constants = g;

  // Radial pieces shared by every centre.
  std::vector<double> sn, sw;
  std::vector<KernelProfile> profiles;
  double obs_lhs = 0.0;
  if (opt.verify) {
    const Rule sr = composite_gauss_legendre(0.0, 1.0, 1, 8);
    sn = sr.nodes;
    sw = sr.weights;
    for (double s : sn) profiles.emplace_back(s + 1.0, opt.r_cut, 600, opt.spec);
    const KernelProfile h2(2.0, kernel_support_radius(2.0, 1e-16), 1200, opt.spec);
    obs_lhs = radial_integral([&](double r) { return h2(r) * h2(r); },
                              [&](double r) { return h2(r) * h2(r); }, opt.spec)
                  .checked("observability left-hand side");
  }

  for (const HalfPlanePoint& z0 : opt.centers) {
    CenterExtraction c;
    c.z0 = z0;
    const double b2 = 2.0 * g.beta;
    const double ah = 0.5 * g.alpha;
    auto lower_f = [&](const HalfPlanePoint& z) {
      const double d = geodesic_distance(z, z0);
      return std::exp(-b2 * d * d);
    };
    auto tail_f = [&](const HalfPlanePoint& z) {
      const double d = geodesic_distance(z, z0);
      return std::exp(-ah * d * d);
    };
    c.lower_integral = riemannian_integral_cartesian(lower_f, z0, [&](double d) { return std::exp(-b2 * d * d); },
                                                     opt.spec)
                           .checked("lower Gaussian integral");
    c.tail_integral = riemannian_integral_cartesian(tail_f, z0, [&](double d) { return std::exp(-ah * d * d); },
                                                    opt.spec)
                          .checked("tail Gaussian integral");
    c.C_doubleprime = prefactor * c.lower_integral;
    c.delta = 0.5 * c.C_doubleprime;
    c.L = smallest_L(g.alpha, c.tail_integral, c.delta, opt.L_step, opt.L_max);

    if (opt.verify) {
      const OccupancyTable table = occupancy_table(region, z0, opt.r_cut, {}, 0.25, 8);
      double acc = 0.0;
      for (std::size_t i = 0; i < sn.size(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < table.rule.size(); ++j) {
          const double r = table.rule.nodes[j];
          const double h = profiles[i](r);
          inner += table.rule.weights[j] * table.theta[j] * h * h * std::sinh(r);
        }
        acc += sw[i] * inner;
      }
      c.obs_lhs = obs_lhs;
      c.obs_omega = acc;
      c.obs_holds = obs_lhs <= C_obs * acc;
      c.mass_radius = std::min(c.L, opt.mass_radius);
      if (c.mass_radius > 0.0) {
        QuadratureSpec mass_spec = opt.spec;
        mass_spec.rel_tol = std::max(mass_spec.rel_tol, 1e-6);
        const QuadResult m = ball_mass_result(region, GeodesicBall(z0, c.mass_radius), mass_spec);
        c.ball_mass = m.checked("extraction ball mass") - m.error;
      }
      c.mass_holds = c.ball_mass >= c.delta;
    }
    out.centers.push_back(c);
  }

  const CenterExtraction& first = out.centers.front();
  out.C_doubleprime = first.C_doubleprime;
  out.delta = first.delta;
  out.L = first.L;
  for (const CenterExtraction& c : out.centers) {
    out.C_doubleprime_spread = std::max(out.C_doubleprime_spread, std::abs(c.C_doubleprime / first.C_doubleprime - 1.0));
    out.L_spread = std::max(out.L_spread, first.L > 0.0 ? std::abs(c.L / first.L - 1.0) : std::abs(c.L));
  }
  return out;
}

}  // namespace hyplab
