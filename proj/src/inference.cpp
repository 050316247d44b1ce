#include "copdiv/inference.hpp"

#include <cmath>

namespace copdiv {

TestReport independence_test(const EstimateResult& result,
                             const VarianceComponents& comps, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("independence_test: alpha must lie in (0,1)");
  }
  TestReport rep;
  rep.alpha = alpha;
  rep.df = 1;
  // phi''(1) = 1 for every built-in generator; the factor stays explicit so
  // the statistic remains correct under any rescaled generator.
  rep.T_n = 2.0 * static_cast<double>(result.n) * result.D_hat;
  rep.q_crit = chisq_quantile(1.0 - alpha, rep.df);
  rep.p_value = 1.0 - chisq_cdf(rep.T_n, rep.df);
  rep.reject = rep.T_n > rep.q_crit;
  rep.sigma_hat = std::sqrt(std::max(comps.sigma2, 0.0));
  rep.warnings = result.warnings;
  return rep;
}

namespace {

void check_query(const PowerQuery& q, bool need_beta) {
  if (!(q.D > 0.0)) {
    throw std::domain_error(
        "power: D must be > 0 (the approximation requires a fixed alternative, "
        "not the independence null)");
  }
  if (!(q.sigma > 0.0)) throw std::domain_error("power: sigma must be > 0");
  if (!(q.alpha > 0.0 && q.alpha < 1.0)) {
    throw std::domain_error("power: alpha must lie in (0,1)");
  }
  if (need_beta && !(q.beta > q.alpha && q.beta < 1.0)) {
    throw std::domain_error("power: beta must lie in (alpha, 1)");
  }
}

double power_at_n(double n, double D, double sigma, double q_crit) {
  return 1.0 - normal_cdf(std::sqrt(n) / sigma * (q_crit / (2.0 * n) - D));
}

}  // namespace

double power_approx(const PowerQuery& q) {
  check_query(q, false);
  if (!(q.n > 0.0)) throw std::domain_error("power: n must be > 0");
  const double q_crit = chisq_quantile(1.0 - q.alpha, 1);
  return power_at_n(q.n, q.D, q.sigma, q_crit);
}

SampleSizeResult sample_size(const PowerQuery& q) {
  check_query(q, true);
  const double q_crit = chisq_quantile(1.0 - q.alpha, 1);
  auto pw = [&](double n) { return power_at_n(n, q.D, q.sigma, q_crit); };

  // power is strictly increasing in n for D > 0
  double lo = 1.0, hi = 1e9;
  if (pw(hi) < q.beta) {
    throw std::runtime_error("sample_size: target power unreachable below n = 1e9");
  }
  SampleSizeResult out;
  if (pw(lo) >= q.beta) {
    out.n0 = lo;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (pw(mid) >= q.beta ? hi : lo) = mid;
      if (hi - lo < 1e-9 * (1.0 + hi)) break;
    }
    out.n0 = 0.5 * (lo + hi);
  }
  out.n_star = static_cast<long long>(std::floor(out.n0)) + 1;

  const double z = normal_quantile(1.0 - q.beta);
  const double a = q.sigma * z * z;
  const double b = q_crit * q.D;
  out.n0_closed_form = ((a + b) - std::sqrt(a * (a + 2.0 * b))) / (2.0 * q.D * q.D);
  return out;
}

PopulationDivergence population_divergence(const CriterionContext& ctx,
                                           double theta_alt) {
  const CopulaModel& model = ctx.model();
  const QuadratureRule& rule = ctx.rule();
  const PhiSpec& phi = ctx.phi();
  const std::size_t m = static_cast<std::size_t>(rule.order);

  std::vector<DensityDerivs> grid(m * m);
  model.density_derivs_grid(theta_alt, rule.nodes, rule.nodes, grid.data());

  // Y(x) = int_x^1 int_0^1 dm/du1 (s,t) c(s,t) dt ds at the per-axis nodes;
  // exchangeability makes one table serve both coordinates.
  std::vector<double> Y(m);
  std::vector<double> outer(m);
  std::vector<DensityDerivs> strip(m * m);
  const double u_max = std::nextafter(1.0, 0.0);
  for (std::size_t ix = 0; ix < m; ++ix) {
    const double x = rule.nodes[ix];
    const double span = 1.0 - x;
    if (span <= 1e-14) {
      Y[ix] = 0.0;
      continue;
    }
    for (std::size_t i = 0; i < m; ++i)
      outer[i] = std::min(x + span * rule.nodes[i], u_max);
    model.density_derivs_grid(theta_alt, outer, rule.nodes, strip.data());
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const DensityDerivs& d = strip[i * m + j];
        row += rule.weights[j] * ctx.dm_du(d, 1) * d.c;
      }
      acc += rule.weights[i] * row;
    }
    Y[ix] = span * acc;
  }

  PopulationDivergence out;
  double mean_g = 0.0, mean_g2 = 0.0;
  const double eps = ctx.clamp_eps();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = rule.weights[i] * rule.weights[j];
      const double c = std::max(grid[i * m + j].c, eps);
      out.D += w * phi.value(1.0 / c) * c;
      const double g = ctx.m_value(theta_alt, rule.nodes[i], rule.nodes[j]) +
                       Y[i] + Y[j];
      mean_g += w * g * c;
      mean_g2 += w * g * g * c;
    }
  }
  out.sigma2 = std::max(mean_g2 - mean_g * mean_g, 0.0);
  return out;
}

double test_power_at(const CriterionContext& ctx, double theta_alt, double n,
                     double alpha) {
  if (theta_alt == ctx.model().theta0()) {
    throw std::domain_error(
        "test_power_at: theta_alt equals the independence value; the power "
        "approximation requires a fixed alternative");
  }
  const PopulationDivergence pd = population_divergence(ctx, theta_alt);
  PowerQuery q;
  q.D = pd.D;
  q.sigma = std::sqrt(pd.sigma2);
  q.n = n;
  q.alpha = alpha;
  return power_approx(q);
}

}  // namespace copdiv
