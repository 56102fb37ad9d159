#include "hyplab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>

#include "hyplab/errors.hpp"

namespace hyplab {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(tail_tol > 0.0))
    throw InvalidArgument("quadrature tolerances must be positive");
  if (max_subdivisions < 1) throw InvalidArgument("max_subdivisions must be >= 1");
  if (mc_samples < 0) throw InvalidArgument("mc_samples must be >= 0");
}

double QuadResult::checked(const std::string& context) const {
  if (!converged)
    throw NonConvergence(context + ": tolerance not reached (estimate " + std::to_string(value) +
                             ", error " + std::to_string(error) + ")",
                         value, error);
  return value;
}

QuadResult& QuadResult::operator+=(const QuadResult& other) {
  value += other.value;
  error += other.error;
  converged = converged && other.converged;
  evaluations += other.evaluations;
  subdivisions += other.subdivisions;
  return *this;
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const BatchIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> x{};
  std::array<double, 15> fx{};
  for (int j = 0; j < 7; ++j) {
    x[2 * j] = center - half * kXgk[j];
    x[2 * j + 1] = center + half * kXgk[j];
  }
  x[14] = center;
  f(x, fx);

  const double fc = fx[14];
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double sum = fx[2 * j] + fx[2 * j + 1];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(fx[2 * j]) + std::abs(fx[2 * j + 1]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fx[2 * j] - mean) + std::abs(fx[2 * j + 1] - mean));

  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  for (double v : fx)
    if (!std::isfinite(v)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk, err};
}

}  // namespace

QuadResult integrate(const BatchIntegrand& f, std::span<const double> breakpoints, const QuadratureSpec& spec) {
  spec.validate();
  if (breakpoints.size() < 2) throw InvalidArgument("integrate needs at least two breakpoints");
  std::priority_queue<Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  QuadResult out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i] == breakpoints[i + 1]) continue;
    Segment s = kronrod15(f, breakpoints[i], breakpoints[i + 1]);
    out.evaluations += 15;
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }
  if (heap.empty()) return out;

  int splits = 0;
  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (total_err > target() && splits < spec.max_subdivisions) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum to shed drift from the running updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  out.subdivisions = splits;
  out.converged = std::isfinite(total) && total_err <= target();
  return out;
}

QuadResult integrate(const BatchIntegrand& f, double a, double b, const QuadratureSpec& spec) {
  const std::array<double, 2> ends{a, b};
  return integrate(f, ends, spec);
}

namespace {

Rule compute_gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(compute_gauss_legendre(n));
  return *slot;
}

Rule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw InvalidArgument("panel count must be >= 1");
  const Rule& base = gauss_legendre(order);
  Rule out;
  out.nodes.reserve(static_cast<std::size_t>(panels) * order);
  out.weights.reserve(out.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int i = 0; i < order; ++i) {
      out.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
      out.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return out;
}

Rule composite_gauss_legendre(std::span<const double> breakpoints, double max_width, int order) {
  Rule out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    Rule piece = composite_gauss_legendre(a, b, panels, order);
    out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return out;
}

}  // namespace hyplab
