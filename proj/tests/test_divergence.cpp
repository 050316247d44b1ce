#include <doctest.h>

#include <cmath>

#include "copdiv/divergence.hpp"
#include "copdiv/numeric.hpp"
#include "copdiv/rng.hpp"
#include "support/oracles.hpp"

using namespace copdiv;
namespace tst = copdiv::testing;

TEST_CASE("evaluate: pinned values") {
  // kl(2) = 2 log 2 - 1, hellinger(2) = 2 (sqrt 2 - 1)^2
  CHECK(evaluate(builtin(Divergence::kl), 2.0).value ==
        doctest::Approx(0.38629436111989062).epsilon(1e-14));
  const auto c1 = evaluate(builtin(Divergence::chi2), 1.0);
  CHECK(c1.value == 0.0);
  CHECK(c1.deriv1 == 0.0);
  CHECK(c1.deriv2 == 1.0);
  CHECK(evaluate(builtin(Divergence::hellinger), 2.0).value ==
        doctest::Approx(0.3431457505076198).epsilon(1e-14));
}

TEST_CASE("registry: five generators, l1 absent, shared normalization") {
  const auto all = builtins();
  REQUIRE(all.size() == 5);
  CHECK(all[0].name == "kl");
  CHECK(all[1].name == "kl-m");
  CHECK(all[2].name == "chi2");
  CHECK(all[3].name == "chi2-m");
  CHECK(all[4].name == "hellinger");
  CHECK(find_builtin("l1") == nullptr);
  for (const auto& phi : all) {
    const auto e = evaluate(phi, 1.0);
    CHECK(e.value == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e.deriv1 == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e.deriv2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(phi.a_phi < 1.0);
    CHECK(phi.b_phi > 1.0);
  }
}

TEST_CASE("domain errors identify the generator") {
  CHECK_THROWS_WITH_AS(evaluate(builtin(Divergence::kl), -1.0),
                       doctest::Contains("kl"), std::domain_error);
  CHECK_THROWS_AS(evaluate(builtin(Divergence::hellinger), 0.0), std::domain_error);
  CHECK_NOTHROW(evaluate(builtin(Divergence::chi2), -5.0));
}

TEST_CASE("conjugates: closed forms vs grid-maximization oracle") {
  auto sup_value = [](const PhiSpec& phi, double t, double lo, double hi) {
    const double xs = tst::grid_argmax(
        [&](double x) { return t * x - phi.value(x); }, lo, hi, 20000);
    return t * xs - phi.value(xs);
  };

  CHECK(conjugate(builtin(Divergence::chi2), 0.0) == doctest::Approx(0.0));
  // kl-m: phi*(t) = -log(1-t) for t < 1
  for (double t : {-3.0, -1.0, -0.25, 0.0, 0.4, 0.9}) {
    const double got = conjugate(builtin(Divergence::kl_m), t);
    CHECK(got == doctest::Approx(-std::log1p(-t)).epsilon(1e-12));
    CHECK(got == doctest::Approx(sup_value(builtin(Divergence::kl_m), t, 1e-9, 60.0))
                     .epsilon(1e-6));
  }
  CHECK(std::isinf(conjugate(builtin(Divergence::kl_m), 1.5)));
  // hellinger: unbounded at t = 2 (objective grows without bound)
  CHECK(std::isinf(conjugate(builtin(Divergence::hellinger), 2.0)));
  {
    const auto& h = builtin(Divergence::hellinger);
    const double v1 = 2.0 * 1e3 - h.value(1e3);
    const double v2 = 2.0 * 1e6 - h.value(1e6);
    CHECK(v2 > v1);  // grid oracle confirmation of unboundedness
  }
  for (double t : {-2.0, -0.5, 0.0, 0.5, 1.5}) {
    CHECK(conjugate(builtin(Divergence::kl), t) ==
          doctest::Approx(std::expm1(t)).epsilon(1e-12));
    CHECK(conjugate(builtin(Divergence::chi2), t) ==
          doctest::Approx(sup_value(builtin(Divergence::chi2), t, -50.0, 50.0))
              .epsilon(1e-6));
  }
}

TEST_CASE("Young/Fenchel equality and inequality") {
  Xoshiro256pp rng(7);
  for (const auto& phi : builtins()) {
    for (double x : {0.1, 0.4, 0.9, 1.0, 1.3, 2.5, 7.0}) {
      const double lhs = conjugate(phi, phi.deriv1(x));
      const double rhs = x * phi.deriv1(x) - phi.value(x);
      CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
    for (int i = 0; i < 200; ++i) {
      const double x = 0.05 + 10.0 * rng.uniform01();
      const double t = -2.0 + 3.0 * rng.uniform01();
      const double bound = phi.value(x) + conjugate(phi, t);
      if (std::isfinite(bound)) CHECK(t * x <= bound + 1e-12);
    }
  }
}

TEST_CASE("derivatives vs central differences; convexity") {
  Xoshiro256pp rng(11);
  for (const auto& phi : builtins()) {
    for (int i = 0; i < 100; ++i) {
      const double x = 0.05 + (20.0 - 0.05) * rng.uniform01();
      const double h = 1e-5 * std::max(1.0, x);
      const double fd = tst::fd1([&](double y) { return phi.deriv1(y); }, x, h);
      CHECK(tst::rel_err(phi.deriv2(x), fd) <= 1e-6);
      const double fd3 = tst::fd1([&](double y) { return phi.deriv2(y); }, x, h);
      CHECK(tst::rel_err(phi.deriv3(x), fd3) <= 1e-5);
    }
    for (int i = 0; i < 200; ++i) {
      double x1 = 0.05 + 15.0 * rng.uniform01();
      double x2 = 0.05 + 15.0 * rng.uniform01();
      const double lam = rng.uniform01();
      const double mix = phi.value(lam * x1 + (1.0 - lam) * x2);
      CHECK(mix <= lam * phi.value(x1) + (1.0 - lam) * phi.value(x2) + 1e-12);
    }
  }
}

TEST_CASE("c-space kernels match the x-space definitions") {
  for (const auto& phi : builtins()) {
    for (double c : {1e-6, 0.01, 0.3, 1.0, 2.0, 15.0, 1e4}) {
      const double x = 1.0 / c;
      const double k1_ref = phi.deriv1(x) + phi.deriv2(1.0) * (c - 1.0);
      const double k2_ref = phi.deriv1(x) / c - phi.value(x);
      CHECK(tst::rel_err(phi.k1_centered(c), k1_ref, 1e-10) <= 1e-9);
      CHECK(tst::rel_err(phi.k2(c), k2_ref, 1e-10) <= 1e-9);
    }
    // k2 limit at c -> 0 declared correctly
    if (std::isfinite(phi.k2_at_zero)) {
      CHECK(std::abs(phi.k2(1e-14) - phi.k2_at_zero) <= 1e-10);
    } else {
      CHECK(phi.k2(1e-300) > phi.k2(1e-14));  // grows without bound as c -> 0
    }
  }
  CHECK(builtin(Divergence::kl_m).k1_identically_zero);
  CHECK(builtin(Divergence::kl_m).k1_centered(17.3) == 0.0);
}
