#include "copdiv/divergence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "copdiv/numeric.hpp"

namespace copdiv {

namespace {

// ---- Kullback-Leibler: phi(x) = x log x - x + 1 on (0, inf) ----
double kl_v(double x) { return x * std::log(x) - x + 1.0; }
double kl_d1(double x) { return std::log(x); }
double kl_d2(double x) { return 1.0 / x; }
double kl_d3(double x) { return -1.0 / (x * x); }
double kl_conj(double t) { return std::expm1(t); }
double kl_k1c(double c) { return -std::log(c) + c - 1.0; }
double kl_k2(double c) { return 1.0 / c - 1.0; }

// ---- modified KL: phi(x) = -log x + x - 1 on (0, inf) ----
double klm_v(double x) { return -std::log(x) + x - 1.0; }
double klm_d1(double x) { return 1.0 - 1.0 / x; }
double klm_d2(double x) { return 1.0 / (x * x); }
double klm_d3(double x) { return -2.0 / (x * x * x); }
double klm_conj(double t) { return t < 1.0 ? -std::log1p(-t) : kInf; }
double klm_k1c(double) { return 0.0; }  // phi'(1/c) = 1 - c exactly
double klm_k2(double c) { return -std::log(c); }

// ---- chi2: phi(x) = (x-1)^2 / 2 on (-inf, inf) ----
double chi2_v(double x) { return 0.5 * (x - 1.0) * (x - 1.0); }
double chi2_d1(double x) { return x - 1.0; }
double chi2_d2(double) { return 1.0; }
double chi2_d3(double) { return 0.0; }
double chi2_conj(double t) { return t + 0.5 * t * t; }
double chi2_k1c(double c) { return 1.0 / c + c - 2.0; }
double chi2_k2(double c) { return 0.5 * (1.0 / (c * c) - 1.0); }

// ---- modified chi2: phi(x) = (x-1)^2 / (2x) on (0, inf) ----
double chi2m_v(double x) { return 0.5 * (x - 1.0) * (x - 1.0) / x; }
double chi2m_d1(double x) { return 0.5 * (1.0 - 1.0 / (x * x)); }
double chi2m_d2(double x) { return 1.0 / (x * x * x); }
double chi2m_d3(double x) { return -3.0 / (x * x * x * x); }
double chi2m_conj(double t) { return t <= 0.5 ? -std::expm1(0.5 * std::log1p(-2.0 * t)) : kInf; }
double chi2m_k1c(double c) { return -0.5 * (1.0 - c) * (1.0 - c); }
double chi2m_k2(double c) { return 1.0 - c; }

// ---- Hellinger: phi(x) = 2 (sqrt(x) - 1)^2 on [0, inf) ----
double hel_v(double x) {
  const double s = std::sqrt(x) - 1.0;
  return 2.0 * s * s;
}
double hel_d1(double x) { return 2.0 - 2.0 / std::sqrt(x); }
double hel_d2(double x) { return std::pow(x, -1.5); }
double hel_d3(double x) { return -1.5 * std::pow(x, -2.5); }
double hel_conj(double t) { return t < 2.0 ? 2.0 * t / (2.0 - t) : kInf; }
double hel_k1c(double c) {
  const double s = std::sqrt(c) - 1.0;
  return s * s;
}
double hel_k2(double c) { return 2.0 / std::sqrt(c) - 2.0; }

constexpr PhiSpec kBuiltins[] = {
    {Divergence::kl, "kl", 0.0, kInf, false, kl_v, kl_d1, kl_d2, kl_d3, kl_conj,
     kl_k1c, kl_k2, false, kInf, kInf},
    {Divergence::kl_m, "kl-m", 0.0, kInf, false, klm_v, klm_d1, klm_d2, klm_d3,
     klm_conj, klm_k1c, klm_k2, true, kInf, 1.0},
    {Divergence::chi2, "chi2", -kInf, kInf, false, chi2_v, chi2_d1, chi2_d2,
     chi2_d3, chi2_conj, chi2_k1c, chi2_k2, false, kInf, kInf},
    {Divergence::chi2_m, "chi2-m", 0.0, kInf, false, chi2m_v, chi2m_d1, chi2m_d2,
     chi2m_d3, chi2m_conj, chi2m_k1c, chi2m_k2, false, 1.0, 0.5},
    {Divergence::hellinger, "hellinger", 0.0, kInf, true, hel_v, hel_d1, hel_d2,
     hel_d3, hel_conj, hel_k1c, hel_k2, false, kInf, 2.0},
};

}  // namespace

PhiEval evaluate(const PhiSpec& phi, double x) {
  const bool below = phi.closed_lower ? (x < phi.a_phi) : (x <= phi.a_phi);
  if (below || x >= phi.b_phi || !std::isfinite(x)) {
    // x == a_phi with a closed endpoint falls through to the continuous
    // extension; hellinger at 0 gives (2, -inf, inf) so keep it excluded for
    // the derivative triple.
    if (!(phi.closed_lower && x == phi.a_phi)) {
      throw std::domain_error("divergence '" + std::string(phi.name) + "': x = " +
                              std::to_string(x) + " outside domain");
    }
  }
  if (phi.closed_lower && x == phi.a_phi) {
    throw std::domain_error("divergence '" + std::string(phi.name) +
                            "': derivatives undefined at the closed endpoint x = " +
                            std::to_string(x));
  }
  return {phi.value(x), phi.deriv1(x), phi.deriv2(x)};
}

double conjugate(const PhiSpec& phi, double t) { return phi.conjugate(t); }

std::span<const PhiSpec> builtins() { return {kBuiltins, 5}; }

const PhiSpec& builtin(Divergence id) {
  for (const auto& p : kBuiltins) {
    if (p.id == id) return p;
  }
  throw std::logic_error("unknown divergence id");
}

const PhiSpec* find_builtin(std::string_view name) {
  for (const auto& p : kBuiltins) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace copdiv
