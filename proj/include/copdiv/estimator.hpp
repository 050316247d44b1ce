#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "copdiv/criterion.hpp"

// theta-hat and D-hat by maximizing the empirical dual criterion over the
// extended parameter space, plus the sandwich variance components of the
// limit laws: S (criterion curvature), M (variance of the rank-corrected
// influence), Xi = M / S^2, and sigma^2 (variance of the divergence
// estimate under the alternative). The rank corrections W_i / Y_i are
// half-strip integrals of the mixed partials of m against the plug-in
// density.

namespace copdiv {

struct EstimateResult {
  double theta_hat = 0.0;
  double D_hat = 0.0;
  double criterion_value = 0.0;  // equals D_hat
  bool converged = false;
  bool boundary = false;  // optimum at the working-box edge (or sentinel cliff)
  int iterations = 0;
  double gradient_norm = 0.0;
  std::size_t n = 0;
  std::vector<std::string> warnings;
};

struct VarianceComponents {
  double S = 0.0;       // -(1/n) sum d2m/dtheta2(theta_hat, u_k)
  double M = 0.0;       // var of dm/dtheta + W1 + W2 over observations
  double Xi = 0.0;      // S^{-1} M S^{-1}
  double sigma2 = 0.0;  // var of m + Y1 + Y2 over observations
  std::vector<double> W1, W2;  // per-observation corrections
  std::vector<double> Y1, Y2;
};

// Maximizes the empirical criterion over the intersection of the extended
// space with the (family, divergence) admissible range. Infinite box edges
// are clipped to a finite working span; hitting the clip edge or the
// inadmissibility sentinel is reported as boundary=true with a warning and
// no first-order-condition check. Throws when the box is degenerate or no
// admissible point exists.
EstimateResult fit(const CriterionContext& ctx, const PseudoSample& sample,
                   const OptimizerSettings& settings = {});

// Plug-in estimates of S, M, Xi, sigma^2 at theta_hat (population density
// replaced by c_{theta_hat}). Throws when the curvature estimate S is not
// positive (the non-singularity requirement on the criterion Hessian).
VarianceComponents variance_components(const CriterionContext& ctx,
                                       const PseudoSample& sample,
                                       double theta_hat);

// Wald interval theta_hat +/- z_{(1+level)/2} sqrt(Xi / n).
std::array<double, 2> confidence_interval(const EstimateResult& result,
                                          const VarianceComponents& comps,
                                          double level);

}  // namespace copdiv
