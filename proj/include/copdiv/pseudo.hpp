#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Rank-based pseudo-observations and empirical-copula integrals. The pseudo
// sample is the sole pathway from raw data into every criterion: all
// downstream statistics are multivariate rank statistics (averages of a
// score over these points).

namespace copdiv {

enum class PseudoMode {
  divide_n_plus_1,  // u = R/(n+1); keeps every point strictly interior
  divide_n,         // u = R/n; the raw empirical-margin scaling
};

struct PseudoSample {
  std::size_t n = 0;
  std::vector<std::array<double, 2>> points;
  PseudoMode mode = PseudoMode::divide_n_plus_1;
  bool had_ties = false;  // midranks were applied in at least one margin
};

// Ranks each margin (midranks under ties) and rescales by the chosen mode.
// Throws on n < 2 or non-finite coordinates.
PseudoSample pseudo_observations(std::span<const std::array<double, 2>> data,
                                 PseudoMode mode = PseudoMode::divide_n_plus_1);

// C_n(u) = (1/n) sum 1{u_hat_1k <= u1} 1{u_hat_2k <= u2}
double empirical_copula(const PseudoSample& sample, double u1, double u2);

// (1/n) sum psi(u_hat_k) = integral of psi against the empirical copula.
// Throws std::runtime_error naming the offending point when psi is
// non-finite there.
template <class F>
double rank_integral(const PseudoSample& sample, F&& psi) {
  if (sample.n == 0) throw std::invalid_argument("rank_integral: empty sample");
  double acc = 0.0;
  for (const auto& p : sample.points) {
    const double v = psi(p[0], p[1]);
    if (!std::isfinite(v)) {
      throw std::runtime_error("rank_integral: non-finite score at pseudo-observation (" +
                               std::to_string(p[0]) + ", " + std::to_string(p[1]) + ")");
    }
    acc += v;
  }
  return acc / static_cast<double>(sample.n);
}

}  // namespace copdiv
