#pragma once

#include <array>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "copdiv/copula.hpp"
#include "copdiv/divergence.hpp"
#include "copdiv/numeric.hpp"
#include "copdiv/pseudo.hpp"

// The dual objective
//
//   m(theta, u) = K1(theta) - K2(theta, u),
//   K1(theta)   = int_{(0,1)^2} phi'(1 / c_theta(s, t)) ds dt,
//   K2(theta,u) = phi'(1/c) / c - phi(1/c)   at c = c_theta(u),
//
// whose integral against the empirical copula is maximized over theta. The
// constant term integrates over dummy variables: it does not depend on the
// outer u. K1 is evaluated through the centered integrand
// phi'(1/c) + phi''(1)(c-1), which has the same integral (the density
// normalizes to 1) but cancels the rule's normalization error; for the
// kl-m generator it vanishes identically and the criterion is exactly the
// pseudo-log-likelihood.
//
// Densities are floored at clamp_eps inside every 1/c expression. A clamped
// pseudo-observation with an unbounded K2 poisons the empirical criterion to
// -inf, which the optimizer treats as an excluded point; that is how
// Clayton's zero-support region at theta < 0 steers the fit instead of
// silently biasing it.

namespace copdiv {

class CriterionContext {
 public:
  CriterionContext(const PhiSpec& phi, const CopulaModel& model,
                   const QuadratureRule& rule, double clamp_eps = 1e-12);

  const PhiSpec& phi() const { return phi_; }
  const CopulaModel& model() const { return model_; }
  const QuadratureRule& rule() const { return rule_; }
  double clamp_eps() const { return clamp_eps_; }

  double m_value(double theta, double u1, double u2) const;

  struct MDerivs {
    double dtheta;
    double dtheta2;
    double du1;
    double du2;
    double dtheta_du1;
    double dtheta_du2;
  };
  MDerivs m_derivs(double theta, double u1, double u2) const;

  // int m(theta, .) dC_n; -inf sentinel when a clamped pseudo-observation
  // has a divergent K2 there.
  double empirical_criterion(const PseudoSample& sample, double theta) const;

  struct CritDerivs {
    double gradient;  // Phi_n(theta) = int dm/dtheta dC_n
    double hessian;   // Upsilon_n(theta) = int d2m/dtheta2 dC_n
  };
  CritDerivs empirical_criterion_derivs(const PseudoSample& sample,
                                        double theta) const;

  // Constant-term access (cached per theta; derivatives by differentiating
  // under the integral sign, not by differencing the quadrature).
  double k1_const(double theta) const;
  std::array<double, 2> k1_const_derivs(double theta) const;  // {d/dtheta, d2/dtheta2}

  // Point kernels shared with the variance estimator. c is clamped inside.
  double dm_dtheta(double theta, const DensityDerivs& d) const;
  double d2m_dtheta2(double theta, const DensityDerivs& d) const;
  double dm_du(const DensityDerivs& d, int coord) const;        // local term only
  double d2m_dtheta_du(const DensityDerivs& d, int coord) const;

  // Accumulated warnings (inadmissible theta, clamping); draining them
  // resets the set.
  std::vector<std::string> take_warnings() const;

 private:
  struct ConstEntry {
    double k1 = std::numeric_limits<double>::quiet_NaN();
    double dk1 = std::numeric_limits<double>::quiet_NaN();
    double d2k1 = std::numeric_limits<double>::quiet_NaN();
  };

  double clamp(double c) const { return c < clamp_eps_ ? clamp_eps_ : c; }
  void check_admissible(double theta) const;
  ConstEntry& entry(double theta) const;

  const PhiSpec& phi_;
  const CopulaModel& model_;
  QuadratureRule rule_;  // by value: contexts must not dangle on temporaries
  double clamp_eps_;
  double phi2_at_1_;
  Interval admissible_;

  mutable std::map<double, ConstEntry> cache_;
  mutable std::set<std::string> warnings_;
  mutable std::mutex mutex_;
};

}  // namespace copdiv
