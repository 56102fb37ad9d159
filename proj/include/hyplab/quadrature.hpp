#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hyplab {

/// Tolerances and limits shared by every numerical integral.
struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
  double tail_tol = 1e-14;
  int mc_samples = 0;

  /// Throws InvalidArgument unless all tolerances are > 0 and
  /// max_subdivisions >= 1.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
  int subdivisions = 0;

  /// Throws NonConvergence carrying this estimate if !converged.
  double checked(const std::string& context) const;

  QuadResult& operator+=(const QuadResult& other);
};

/// Evaluates f at every node of a batch: out[i] = f(x[i]).
using BatchIntegrand = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [a, b].
/// Stops when the summed error estimate is below max(abs_tol, rel_tol |I|)
/// or max_subdivisions is reached (then converged = false).
QuadResult integrate(const BatchIntegrand& f, double a, double b, const QuadratureSpec& spec);

/// Same with interior breakpoints where f may have kinks.
QuadResult integrate(const BatchIntegrand& f, std::span<const double> breakpoints,
                     const QuadratureSpec& spec);

/// Scalar-integrand convenience wrapper.
template <class F>
QuadResult integrate_scalar(F&& f, double a, double b, const QuadratureSpec& spec) {
  return integrate(
      [&f](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
      },
      a, b, spec);
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

const Rule& gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b] with equal panels.
Rule composite_gauss_legendre(double a, double b, int panels, int order);

/// Gauss-Legendre panels on each consecutive pair of breakpoints; panel
/// width at most max_width.
Rule composite_gauss_legendre(std::span<const double> breakpoints, double max_width, int order);

}  // namespace hyplab
