#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copdiv/copula.hpp"
#include "copdiv/divergence.hpp"
#include "copdiv/numeric.hpp"

// Deterministic replication engine for the limit laws: chi-square null law
// of T_n, asymptotic normality of the standardized estimates, Wald coverage,
// and Monte Carlo power. Replication r draws its generator state from
// (seed, r) alone, so results are independent of scheduling and thread
// count; statistics are sorted before summarization and every reduction runs
// in replication order.

namespace copdiv {

enum class StudyMode { null_law, alternative };

struct StudyConfig {
  StudyMode mode = StudyMode::null_law;
  Family family = Family::clayton;
  Divergence divergence = Divergence::kl_m;
  double theta_true = 0.0;  // forced to theta0 in null mode
  std::size_t n = 500;
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  int quad_order = 64;
  double clamp_eps = 1e-12;
  OptimizerSettings optimizer;
  // alternative mode: also estimate Xi per replication and standardize
  // (needed for the normality/coverage checks; power-only studies can skip
  // the variance step)
  bool compute_variance = true;
  int threads = 0;  // 0 = hardware concurrency
};

struct StudySummary {
  // sorted ascending; T_n in null mode, sqrt(n)(theta_hat - theta_T)/sqrt(Xi)
  // in alternative mode with variance, T_n otherwise
  std::vector<double> statistics;
  double rejection_rate = 0.0;
  double ks_to_reference = 0.0;  // chi2_1 under the null, N(0,1) standardized
  double mean = 0.0;
  double variance = 0.0;
  std::size_t failures = 0;
  double runtime_seconds = 0.0;  // excluded from serialized reports

  // alternative mode with variance
  double coverage = 0.0;              // 95% Wald CI coverage of theta_true
  double mean_xi = 0.0;               // average plug-in Xi_hat
  double var_scaled_estimates = 0.0;  // empirical var of sqrt(n)(theta_hat - theta_T)

  std::vector<std::string> warnings;
};

StudySummary run_study(const StudyConfig& config);

// Same computation; exists as the determinism contract: identical configs
// produce identical summaries regardless of thread count.
StudySummary reproduce(const StudyConfig& config);

}  // namespace copdiv
