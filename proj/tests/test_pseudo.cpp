#include <doctest.h>

#include <cmath>

#include "copdiv/pseudo.hpp"
#include "copdiv/rng.hpp"

using namespace copdiv;

namespace {
std::vector<std::array<double, 2>> rank123_data() {
  // ranks (1,2), (2,3), (3,1)
  return {{10.0, 5.0}, {20.0, 9.0}, {30.0, 1.0}};
}
}  // namespace

TEST_CASE("pseudo_observations: scaling modes and ties") {
  const auto data = rank123_data();
  const auto ps = pseudo_observations(data);
  REQUIRE(ps.n == 3);
  CHECK_FALSE(ps.had_ties);
  CHECK(ps.points[0] == std::array<double, 2>{0.25, 0.5});
  CHECK(ps.points[1] == std::array<double, 2>{0.5, 0.75});
  CHECK(ps.points[2] == std::array<double, 2>{0.75, 0.25});

  const auto pn = pseudo_observations(data, PseudoMode::divide_n);
  CHECK(pn.points[0][0] == doctest::Approx(1.0 / 3));
  CHECK(pn.points[1][1] == doctest::Approx(1.0));
  CHECK(pn.points[2][0] == doctest::Approx(1.0));

  // midranks: values (5, 5) among {5, 5, 9} share rank 1.5
  std::vector<std::array<double, 2>> tied{{5.0, 1.0}, {5.0, 2.0}, {9.0, 3.0}};
  const auto pt = pseudo_observations(tied);
  CHECK(pt.had_ties);
  CHECK(pt.points[0][0] == doctest::Approx(1.5 / 4));
  CHECK(pt.points[1][0] == doctest::Approx(1.5 / 4));
  CHECK(pt.points[2][0] == doctest::Approx(3.0 / 4));
}

TEST_CASE("pseudo_observations: errors") {
  std::vector<std::array<double, 2>> one{{1.0, 2.0}};
  CHECK_THROWS_AS(pseudo_observations(one), std::invalid_argument);
  std::vector<std::array<double, 2>> bad{{1.0, 2.0}, {std::nan(""), 1.0}};
  CHECK_THROWS_AS(pseudo_observations(bad), std::invalid_argument);
}

TEST_CASE("pseudo sample margins are the exact grid; invariance under transforms") {
  Xoshiro256pp rng(3);
  const std::size_t n = 200;
  std::vector<std::array<double, 2>> data(n);
  for (auto& p : data) p = {rng.uniform01(), rng.uniform01()};
  const auto ps = pseudo_observations(data);

  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = ps.points[k][0];
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(xs[k] == static_cast<double>(k + 1) / static_cast<double>(n + 1));
  }
  // C_n(u_(k), 1) = k/n in the no-ties default mode
  for (std::size_t k : {std::size_t{10}, std::size_t{77}, std::size_t{199}}) {
    CHECK(empirical_copula(ps, xs[k], 1.0) ==
          doctest::Approx(static_cast<double>(k + 1) / static_cast<double>(n)));
  }

  // strictly increasing marginal transforms leave the ranks untouched
  auto transformed = data;
  for (auto& p : transformed) {
    p[0] = std::exp(3.0 * p[0]);
    p[1] = p[1] * p[1] * p[1] + 2.0 * p[1];
  }
  const auto pt = pseudo_observations(transformed);
  CHECK(pt.points == ps.points);
}

TEST_CASE("empirical_copula: pinned 3-point values") {
  const auto ps = pseudo_observations(rank123_data());
  // the (0.25, 0.5) point ties the v-threshold and the step function is
  // right-continuous, so it counts; just below the tie nothing is dominated
  CHECK(empirical_copula(ps, 0.5, 0.5) == doctest::Approx(1.0 / 3));
  CHECK(empirical_copula(ps, 0.5, 0.4999) == 0.0);
  CHECK(empirical_copula(ps, 1.0, 1.0) == 1.0);
  CHECK(empirical_copula(ps, 0.5, 0.75) == doctest::Approx(2.0 / 3));
}

TEST_CASE("rank_integral: pinned values, linearity, error naming the point") {
  const auto ps = pseudo_observations(rank123_data());
  CHECK(rank_integral(ps, [](double u, double v) { return u * v; }) ==
        doctest::Approx(0.6875 / 3.0).epsilon(1e-15));
  CHECK(rank_integral(ps, [](double, double) { return 1.0; }) == 1.0);

  auto f = [](double u, double v) { return 2.0 * u - v; };
  auto g = [](double u, double v) { return u * u + 3.0 * v; };
  const double lhs = rank_integral(ps, [&](double u, double v) {
    return 2.5 * f(u, v) - 1.5 * g(u, v);
  });
  const double rhs = 2.5 * rank_integral(ps, f) - 1.5 * rank_integral(ps, g);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));

  CHECK_THROWS_WITH_AS(
      rank_integral(ps, [](double u, double) { return std::log(u - 0.5); }),
      doctest::Contains("0.25"), std::runtime_error);
}
