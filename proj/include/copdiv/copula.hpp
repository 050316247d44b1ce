#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "copdiv/divergence.hpp"
#include "copdiv/numeric.hpp"

// Parametric bivariate copula families: closed-form densities, analytic
// theta- and u-partials, exact conditional-inversion samplers, and the
// parameter-space metadata (natural space, extended space making the
// independence value interior, and the per-divergence admissible range on
// which the dual criterion's defining integral is finite).
//
// All built-in families are exchangeable and have a scalar parameter; the
// independence value is theta0 = 0 for each.

namespace copdiv {

enum class Family { independence, clayton, frank, fgm };

struct Interval {
  double lo;
  double hi;

  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct DensityDerivs {
  double c;
  double dc_dtheta;
  double d2c_dtheta2;
  double dc_du1;
  double dc_du2;
  double d2c_dtheta_du1;
  double d2c_dtheta_du2;
};

class CopulaModel {
 public:
  virtual ~CopulaModel() = default;

  virtual Family family() const = 0;
  virtual std::string_view name() const = 0;
  int dim() const { return 1; }
  double theta0() const { return 0.0; }

  virtual Interval theta_natural() const = 0;   // valid copulas (sampling)
  virtual Interval theta_extended() const = 0;  // density extension, theta0 interior

  // Admissible range of the dual criterion for this family under `phi`:
  // the theta where the defining integral of phi'(1/c_theta) stays finite.
  // Always a sub-interval of theta_extended.
  virtual Interval admissible_theta(const PhiSpec& phi) const = 0;

  // Copula density at strictly interior u. Clayton with theta < 0 returns 0
  // on its zero-support region. Throws std::domain_error on theta outside
  // the extended space or u on the boundary.
  virtual double density(double theta, double u1, double u2) const = 0;

  // Density plus its analytic theta/u partials (see DensityDerivs).
  virtual DensityDerivs density_derivs(double theta, double u1, double u2) const = 0;

  // Tensor-grid evaluation of density_derivs; families override it to share
  // per-axis transcendental tables inside the variance-term quadratures.
  // `out` is row-major with shape (u1.size(), u2.size()).
  virtual void density_derivs_grid(double theta, std::span<const double> u1,
                                   std::span<const double> u2,
                                   DensityDerivs* out) const;

  // Exact sampling by conditional inversion; deterministic in (seed, n).
  // Requires theta in the natural space.
  std::vector<std::array<double, 2>> sample(double theta, std::size_t n,
                                            std::uint64_t seed) const;

  // Inverse of the conditional CDF C(u2 | u1) at w2 (closed form per family).
  virtual double conditional_inverse(double theta, double u1, double w2) const = 0;

  // Kendall's tau: closed form where one exists, otherwise 4*int C dC - 1 by
  // quadrature.
  virtual double kendall_tau(double theta) const = 0;

 protected:
  void require_natural(double theta) const;
  void require_extended(double theta) const;
  static void require_interior(double u1, double u2);
};

const CopulaModel& model(Family family);
const CopulaModel* find_model(std::string_view name);

// Numerical admissibility diagnostic for the extended parameter space: probes
// the integral of |phi'(1 / c_theta)| on nested quadrature grids (orders 32,
// 64, 128). This is a diagnostic, not a proof; the analytic ranges live in
// admissible_theta().
struct AdmissibilityReport {
  bool admissible;  // sequence of nested-grid values stabilized
  std::array<double, 3> values;  // orders 32, 64, 128 (may contain +inf)
};

AdmissibilityReport validate_theta_e(const CopulaModel& model, const PhiSpec& phi,
                                     double theta);

}  // namespace copdiv
