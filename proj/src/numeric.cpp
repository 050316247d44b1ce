#include "copdiv/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace copdiv {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
}

}  // namespace

QuadratureRule QuadratureRule::gauss_legendre01(int order) {
  if (order < 2) throw std::invalid_argument("QuadratureRule: order must be >= 2");
  std::vector<double> x, w;
  legendre(order, x, w);
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    const double t = 0.5 * (x[static_cast<std::size_t>(i)] + 1.0);
    const double wt = 0.5 * w[static_cast<std::size_t>(i)];
    const double a = t * t * t;
    const double b = (1.0 - t) * (1.0 - t) * (1.0 - t);
    const double d = a + b;
    rule.nodes[static_cast<std::size_t>(i)] = a / d;
    rule.weights[static_cast<std::size_t>(i)] =
        wt * 3.0 * (t * t * b + (1.0 - t) * (1.0 - t) * a) / (d * d);
  }
  // renormalize so the weights sum to 1 to machine precision
  long double total = 0.0L;
  for (double wi : rule.weights) total += wi;
  const double scale = static_cast<double>(1.0L / total);
  for (double& wi : rule.weights) wi *= scale;
  return rule;
}

MaximizeResult maximize_scalar(const std::function<double(double)>& g, double lo,
                               double hi, const OptimizerSettings& settings) {
  if (!(lo < hi)) throw std::invalid_argument("maximize_scalar: lo must be < hi");
  if (settings.multistart < 1 || settings.theta_tol <= 0.0) {
    throw std::invalid_argument("maximize_scalar: bad settings");
  }

  MaximizeResult best;
  auto consider = [&best](double x, double v) {
    if (v > best.value) {
      best.value = v;
      best.argmax = x;
    }
  };

  // Grid of cell centres; -inf cells are excluded points.
  const int k = settings.multistart;
  const double h = (hi - lo) / k;
  int ibest = -1;
  double vbest = -kInf;
  for (int i = 0; i < k; ++i) {
    const double t = lo + (i + 0.5) * h;
    const double v = g(t);
    consider(t, v);
    if (v > vbest) {
      vbest = v;
      ibest = i;
    }
  }
  if (ibest < 0 || !(vbest > -kInf)) {
    throw std::runtime_error(
        "maximize_scalar: no admissible point (all multistart values are -inf)");
  }

  double a = std::max(lo, lo + (ibest - 0.5) * h);
  double b = std::min(hi, lo + (ibest + 1.5) * h);

  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = g(x1);
  double f2 = g(x2);
  consider(x1, f1);
  consider(x2, f2);
  int iter = 0;
  while (b - a > settings.theta_tol && iter < settings.max_iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = g(x2);
      consider(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = g(x1);
      consider(x1, f1);
    }
    ++iter;
  }
  const double mid = 0.5 * (a + b);
  consider(mid, g(mid));

  best.converged = (b - a) <= settings.theta_tol;
  best.iterations = iter;
  return best;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0,1)");
  }
  // Acklam's rational approximation, then one Halley step on the CDF.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    // series representation
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // continued fraction (modified Lentz)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

double chisq_cdf(double x, int df) {
  if (df < 1) throw std::domain_error("chisq_cdf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * df, 0.5 * x);
}

double chisq_quantile(double p, int df) {
  if (df < 1) throw std::domain_error("chisq_quantile: df must be >= 1");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("chisq_quantile: p must lie in (0,1)");
  }
  // Wilson-Hilferty start, then safeguarded Newton on the CDF.
  const double z = normal_quantile(p);
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  double x = df * t * t * t;
  if (!(x > 0.0)) x = 0.5;
  double lo = 0.0, hi = kInf;
  for (int it = 0; it < 200; ++it) {
    const double f = chisq_cdf(x, df) - p;
    if (f > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double a = 0.5 * df;
    const double logpdf = (a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) -
                          std::lgamma(a);
    const double pdf = std::exp(logpdf);
    double step = (pdf > 0.0) ? f / pdf : 0.0;
    double xn = x - step;
    if (!(xn > lo && (xn < hi))) {
      xn = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);  // bisect fallback
    }
    if (std::abs(xn - x) < 1e-13 * (1.0 + x)) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

double ks_statistic(std::span<const double> values,
                    const std::function<double(double)>& cdf) {
  if (values.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = cdf(s[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace copdiv
