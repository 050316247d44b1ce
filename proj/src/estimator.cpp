#include "copdiv/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace copdiv {

namespace {

// Infinite extended-space edges are clipped here for the optimizer. Clayton
// tau at 28 is already 0.93; fits that hit the clip are flagged as boundary.
constexpr double kWorkingSpan = 28.0;

double sample_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / (n - 1.0);
}

}  // namespace

EstimateResult fit(const CriterionContext& ctx, const PseudoSample& sample,
                   const OptimizerSettings& settings) {
  const CopulaModel& model = ctx.model();
  const Interval ext = model.theta_extended();
  const Interval adm = model.admissible_theta(ctx.phi());
  double lo = std::max({ext.lo, adm.lo, -kWorkingSpan});
  double hi = std::min({ext.hi, adm.hi, kWorkingSpan});
  if (!(hi > lo)) {
    throw std::runtime_error("fit: degenerate parameter box for family '" +
                             std::string(model.name()) + "' (no scalar parameter to fit)");
  }

  auto objective = [&](double theta) {
    return ctx.empirical_criterion(sample, theta);
  };
  MaximizeResult opt = maximize_scalar(objective, lo, hi, settings);

  EstimateResult res;
  res.n = sample.n;
  res.iterations = opt.iterations;
  res.converged = opt.converged;
  res.theta_hat = opt.argmax;
  res.D_hat = opt.value;

  // The criterion vanishes identically at the independence value, so the sup
  // can never fall below the value there; keep theta0 as an explicit
  // candidate.
  const double theta0 = model.theta0();
  if (theta0 >= lo && theta0 <= hi) {
    const double at0 = objective(theta0);
    if (at0 >= res.D_hat) {
      res.theta_hat = theta0;
      res.D_hat = at0;
    }
  }
  res.criterion_value = res.D_hat;

  if (sample.had_ties) {
    res.warnings.push_back("ties detected in the data; midranks applied");
  }

  // warnings accumulated while optimizing belong to the fit; the boundary
  // probes below may step just outside the admissible range and must not
  // leak their own
  for (auto& w : ctx.take_warnings()) res.warnings.push_back(std::move(w));

  const double edge = std::max(10.0 * settings.theta_tol, 1e-6);
  bool at_box_edge = (res.theta_hat - lo < edge) || (hi - res.theta_hat < edge);
  bool at_sentinel = false;
  if (!at_box_edge) {
    // an optimum pressed against the zero-support sentinel is a boundary too
    at_sentinel = !std::isfinite(objective(res.theta_hat - edge)) ||
                  !std::isfinite(objective(res.theta_hat + edge));
  }
  res.boundary = at_box_edge || at_sentinel;
  if (res.boundary) {
    res.warnings.push_back(at_box_edge
                               ? "theta_hat lies on the optimizer box boundary; "
                                 "first-order condition not checked"
                               : "theta_hat abuts the inadmissible (zero-density) "
                                 "region; first-order condition not checked");
    res.gradient_norm = 0.0;
  } else {
    const auto derivs = ctx.empirical_criterion_derivs(sample, res.theta_hat);
    res.gradient_norm = std::abs(derivs.gradient);
  }
  ctx.take_warnings();  // discard probe artifacts
  return res;
}

VarianceComponents variance_components(const CriterionContext& ctx,
                                       const PseudoSample& sample,
                                       double theta_hat) {
  const CopulaModel& model = ctx.model();
  const QuadratureRule& rule = ctx.rule();
  const std::size_t n = sample.n;

  // Half-strip corrections. All built-in families are exchangeable, so the
  // same strip function serves both margins:
  //   W(x) = int_x^1 int_0^1 d2m/(dtheta du1)(s,t) c(s,t) dt ds
  //   Y(x) = int_x^1 int_0^1 dm/du1(s,t) c(s,t) dt ds
  // evaluated with the shared rule mapped affinely onto [x,1] x [0,1].
  std::vector<double> xs;
  xs.reserve(2 * n);
  for (const auto& p : sample.points) {
    xs.push_back(p[0]);
    xs.push_back(p[1]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const std::size_t m = static_cast<std::size_t>(rule.order);
  std::vector<double> outer(m);
  std::vector<DensityDerivs> grid(m * m);
  std::vector<double> Wat(xs.size()), Yat(xs.size());
  const double u_max = std::nextafter(1.0, 0.0);
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    const double x = xs[ix];
    const double span = 1.0 - x;
    if (span <= 1e-14) {  // zero-measure strip
      Wat[ix] = 0.0;
      Yat[ix] = 0.0;
      continue;
    }
    for (std::size_t i = 0; i < m; ++i)
      outer[i] = std::min(x + span * rule.nodes[i], u_max);
    model.density_derivs_grid(theta_hat, outer, rule.nodes, grid.data());
    double w_acc = 0.0, y_acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double wr = 0.0, yr = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const DensityDerivs& d = grid[i * m + j];
        wr += rule.weights[j] * ctx.d2m_dtheta_du(d, 1) * d.c;
        yr += rule.weights[j] * ctx.dm_du(d, 1) * d.c;
      }
      w_acc += rule.weights[i] * wr;
      y_acc += rule.weights[i] * yr;
    }
    Wat[ix] = span * w_acc;
    Yat[ix] = span * y_acc;
  }
  auto lookup = [&xs](double x) {
    return static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  };

  VarianceComponents vc;
  vc.W1.resize(n);
  vc.W2.resize(n);
  vc.Y1.resize(n);
  vc.Y2.resize(n);
  std::vector<double> infl(n), mvals(n);
  double s_acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = sample.points[k];
    const DensityDerivs d = model.density_derivs(theta_hat, p[0], p[1]);
    s_acc += ctx.d2m_dtheta2(theta_hat, d);
    vc.W1[k] = Wat[lookup(p[0])];
    vc.W2[k] = Wat[lookup(p[1])];
    vc.Y1[k] = Yat[lookup(p[0])];
    vc.Y2[k] = Yat[lookup(p[1])];
    infl[k] = ctx.dm_dtheta(theta_hat, d) + vc.W1[k] + vc.W2[k];
    mvals[k] = ctx.m_value(theta_hat, p[0], p[1]) + vc.Y1[k] + vc.Y2[k];
  }
  vc.S = -s_acc / static_cast<double>(n);
  if (!(vc.S > 0.0) || !std::isfinite(vc.S)) {
    throw std::runtime_error(
        "variance_components: curvature estimate S is singular or not positive "
        "at theta_hat = " + std::to_string(theta_hat));
  }
  vc.M = sample_variance(infl);
  vc.Xi = vc.M / (vc.S * vc.S);
  vc.sigma2 = sample_variance(mvals);
  return vc;
}

std::array<double, 2> confidence_interval(const EstimateResult& result,
                                          const VarianceComponents& comps,
                                          double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("confidence_interval: level must lie in (0,1)");
  }
  if (!(comps.Xi >= 0.0) || !std::isfinite(comps.Xi)) {
    throw std::runtime_error("confidence_interval: covariance estimate not PSD");
  }
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(comps.Xi / static_cast<double>(result.n));
  return {result.theta_hat - half, result.theta_hat + half};
}

}  // namespace copdiv
