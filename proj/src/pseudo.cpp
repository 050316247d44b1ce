#include "copdiv/pseudo.hpp"

#include <algorithm>
#include <numeric>

namespace copdiv {

namespace {

// midranks: tied runs share the average of the ranks they occupy
std::vector<double> ranks(std::span<const std::array<double, 2>> data, int coord,
                          bool* ties) {
  const std::size_t n = data.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return data[a][static_cast<std::size_t>(coord)] < data[b][static_cast<std::size_t>(coord)];
  });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && data[idx[j + 1]][static_cast<std::size_t>(coord)] ==
                            data[idx[i]][static_cast<std::size_t>(coord)]) {
      ++j;
    }
    const double mid = 0.5 * static_cast<double>(i + 1 + j + 1);
    if (j > i) *ties = true;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
    i = j + 1;
  }
  return r;
}

}  // namespace

PseudoSample pseudo_observations(std::span<const std::array<double, 2>> data,
                                 PseudoMode mode) {
  if (data.size() < 2) {
    throw std::invalid_argument("pseudo_observations: need at least 2 observations, got " +
                                std::to_string(data.size()));
  }
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!std::isfinite(data[k][0]) || !std::isfinite(data[k][1])) {
      throw std::invalid_argument("pseudo_observations: non-finite value in row " +
                                  std::to_string(k + 1));
    }
  }
  PseudoSample s;
  s.n = data.size();
  s.mode = mode;
  bool ties = false;
  const auto r1 = ranks(data, 0, &ties);
  const auto r2 = ranks(data, 1, &ties);
  s.had_ties = ties;
  const double denom = (mode == PseudoMode::divide_n_plus_1)
                           ? static_cast<double>(s.n + 1)
                           : static_cast<double>(s.n);
  s.points.resize(s.n);
  for (std::size_t k = 0; k < s.n; ++k) {
    s.points[k] = {r1[k] / denom, r2[k] / denom};
  }
  return s;
}

double empirical_copula(const PseudoSample& sample, double u1, double u2) {
  std::size_t count = 0;
  for (const auto& p : sample.points) {
    if (p[0] <= u1 && p[1] <= u2) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(sample.n);
}

}  // namespace copdiv
