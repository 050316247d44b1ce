#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Shared numerical kernels: tensor quadrature on the unit square, bounded
// scalar maximization, and the distribution special functions used by the
// test statistics.

namespace copdiv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tensor-product quadrature on (0,1)^2. Nodes are Gauss-Legendre points
// composed with a cubic rational grading s(t) = t^3 / (t^3 + (1-t)^3), so
// integrable corner singularities of copula densities (Clayton behaves like
// 1/r near the origin) still converge at the default order. The map is
// symmetric about 1/2 and keeps every node strictly interior; weights stay
// positive and sum to 1.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;    // per-axis, strictly inside (0,1)
  std::vector<double> weights;  // per-axis, positive

  static QuadratureRule gauss_legendre01(int order);
};

// Integrates f over (0,1)^2 with the tensor rule. Throws std::runtime_error
// naming the node if f evaluates to a non-finite value there.
template <class F>
double integrate2d(F&& f, const QuadratureRule& rule) {
  double acc = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    double row = 0.0;
    for (int j = 0; j < rule.order; ++j) {
      const double v = f(rule.nodes[i], rule.nodes[j]);
      if (!std::isfinite(v)) {
        throw std::runtime_error(
            "integrate2d: non-finite integrand at node (" +
            std::to_string(rule.nodes[i]) + ", " + std::to_string(rule.nodes[j]) + ")");
      }
      row += rule.weights[j] * v;
    }
    acc += rule.weights[i] * row;
  }
  return acc;
}

template <class F>
double integrate1d(F&& f, const QuadratureRule& rule) {
  double acc = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw std::runtime_error("integrate1d: non-finite integrand at node " +
                               std::to_string(rule.nodes[i]));
    }
    acc += rule.weights[i] * v;
  }
  return acc;
}

struct OptimizerSettings {
  double theta_tol = 1e-8;  // absolute tolerance on the argmax
  int max_iter = 200;
  int multistart = 16;  // initial grid size over [lo, hi]
};

struct MaximizeResult {
  double argmax = 0.0;
  double value = -kInf;
  bool converged = false;
  int iterations = 0;
};

// Multistart grid scan followed by golden-section refinement on the best
// grid cell. -inf objective values mark excluded points (the criterion uses
// them as an inadmissibility sentinel) and simply lose every comparison.
// Throws std::runtime_error if every multistart evaluation is -inf.
MaximizeResult maximize_scalar(const std::function<double(double)>& g, double lo,
                               double hi, const OptimizerSettings& settings = {});

// Distribution special functions. Absolute accuracy is ~1e-13, comfortably
// inside the 1e-10 the inference layer needs.
double normal_cdf(double x);
double normal_quantile(double p);                 // p in (0,1)
double chisq_cdf(double x, int df);               // df >= 1
double chisq_quantile(double p, int df);          // p in (0,1)
double gamma_p(double a, double x);               // regularized lower incomplete gamma

// One-sample Kolmogorov-Smirnov statistic of `values` against the reference
// CDF. Throws std::invalid_argument on empty input.
double ks_statistic(std::span<const double> values,
                    const std::function<double(double)>& cdf);

}  // namespace copdiv
