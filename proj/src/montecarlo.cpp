#include "copdiv/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "copdiv/criterion.hpp"
#include "copdiv/estimator.hpp"
#include "copdiv/inference.hpp"
#include "copdiv/pseudo.hpp"
#include "copdiv/rng.hpp"

namespace copdiv {

namespace {

struct RepResult {
  double statistic = 0.0;
  bool rejected = false;
  bool covered = false;
  double xi = 0.0;
  double raw_dev = 0.0;  // sqrt(n) (theta_hat - theta_T)
  bool failed = true;
};

}  // namespace

StudySummary run_study(const StudyConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("run_study: reps must be >= 1");
  if (config.n < 20) throw std::invalid_argument("run_study: n must be >= 20");
  const auto t0 = std::chrono::steady_clock::now();

  const CopulaModel& mod = model(config.family);
  const PhiSpec& phi = builtin(config.divergence);
  const double theta_t =
      (config.mode == StudyMode::null_law) ? mod.theta0() : config.theta_true;
  mod.density(theta_t, 0.5, 0.5);  // validate theta up front

  const QuadratureRule rule = QuadratureRule::gauss_legendre01(config.quad_order);
  const double q_crit = chisq_quantile(1.0 - config.alpha, 1);
  const bool standardized =
      config.mode == StudyMode::alternative && config.compute_variance;

  std::vector<RepResult> results(config.reps);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    // contexts are cheap; one per thread keeps the constant-term cache
    // uncontended
    CriterionContext ctx(phi, mod, rule, config.clamp_eps);
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= config.reps) break;
      RepResult& out = results[r];
      try {
        const auto data = mod.sample(theta_t, config.n,
                                     derive_seed(config.seed, r));
        const PseudoSample ps = pseudo_observations(data);
        const EstimateResult fitres = fit(ctx, ps, config.optimizer);
        if (!fitres.converged) continue;  // recorded as failure
        const double tn = 2.0 * static_cast<double>(config.n) * fitres.D_hat;
        out.rejected = tn > q_crit;
        if (standardized) {
          const VarianceComponents vc = variance_components(ctx, ps, fitres.theta_hat);
          const double dev =
              std::sqrt(static_cast<double>(config.n)) * (fitres.theta_hat - theta_t);
          out.raw_dev = dev;
          out.xi = vc.Xi;
          out.statistic = dev / std::sqrt(vc.Xi);
          const auto ci = confidence_interval(fitres, vc, 0.95);
          out.covered = ci[0] <= theta_t && theta_t <= ci[1];
        } else {
          out.statistic = tn;
        }
        out.failed = false;
      } catch (const std::exception&) {
        // failure stays recorded; the study never aborts on one replication
      }
    }
  };

  int nthreads = config.threads > 0
                     ? config.threads
                     : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nthreads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(nthreads), config.reps));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // sequential, order-fixed aggregation
  StudySummary s;
  std::size_t rejected = 0, covered = 0;
  double xi_acc = 0.0;
  std::vector<double> raw;
  for (const RepResult& r : results) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    s.statistics.push_back(r.statistic);
    if (r.rejected) ++rejected;
    if (standardized) {
      if (r.covered) ++covered;
      xi_acc += r.xi;
      raw.push_back(r.raw_dev);
    }
  }
  if (s.statistics.empty()) {
    throw std::runtime_error("run_study: every replication failed");
  }
  std::sort(s.statistics.begin(), s.statistics.end());
  const double m = static_cast<double>(s.statistics.size());
  for (double v : s.statistics) s.mean += v;
  s.mean /= m;
  for (double v : s.statistics) s.variance += (v - s.mean) * (v - s.mean);
  s.variance = (s.statistics.size() > 1) ? s.variance / (m - 1.0) : 0.0;
  s.rejection_rate = static_cast<double>(rejected) / m;
  if (standardized) {
    s.coverage = static_cast<double>(covered) / m;
    s.mean_xi = xi_acc / m;
    std::sort(raw.begin(), raw.end());
    double rm = 0.0;
    for (double v : raw) rm += v;
    rm /= m;
    for (double v : raw) s.var_scaled_estimates += (v - rm) * (v - rm);
    s.var_scaled_estimates =
        (raw.size() > 1) ? s.var_scaled_estimates / (m - 1.0) : 0.0;
    s.ks_to_reference = ks_statistic(s.statistics, normal_cdf);
  } else {
    s.ks_to_reference =
        ks_statistic(s.statistics, [](double x) { return chisq_cdf(x, 1); });
  }
  if (s.failures * 10 > config.reps) {
    s.warnings.push_back("more than 10% of replications failed (" +
                         std::to_string(s.failures) + " of " +
                         std::to_string(config.reps) + ")");
  }
  s.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // avoid -0 vs 0 byte differences in serialized summaries
  if (s.variance == 0.0) s.variance = 0.0;
  return s;
}

StudySummary reproduce(const StudyConfig& config) { return run_study(config); }

}  // namespace copdiv
