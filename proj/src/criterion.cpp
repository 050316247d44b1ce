#include "copdiv/criterion.hpp"

#include <cmath>

namespace copdiv {

namespace {

// chain-rule kernels in c-space, x = 1/c:
//   A(c)  = phi''(x) / c^2 = -d/dc phi'(x)
//   B(c)  = phi''(x) / c^3 = -d/dc K2(c)
//   B'(c) = -(phi'''(x) + 3 c phi''(x)) / c^5
struct CKernels {
  double A, B, Bp, Gp, Gpp;
};

CKernels kernels(const PhiSpec& phi, double c, double phi2_at_1) {
  const double x = 1.0 / c;
  const double p2 = phi.deriv2(x);
  const double p3 = phi.deriv3(x);
  const double c2 = c * c;
  const double c4 = c2 * c2;
  CKernels k;
  k.A = p2 / c2;
  k.B = p2 / (c2 * c);
  k.Bp = -(p3 + 3.0 * c * p2) / (c4 * c);
  k.Gp = phi2_at_1 - k.A;            // d/dc of the centered K1 integrand
  k.Gpp = (p3 + 2.0 * c * p2) / c4;  // = -A'(c)
  return k;
}

}  // namespace

CriterionContext::CriterionContext(const PhiSpec& phi, const CopulaModel& model,
                                   const QuadratureRule& rule, double clamp_eps)
    : phi_(phi), model_(model), rule_(rule), clamp_eps_(clamp_eps) {
  if (!(clamp_eps > 0.0 && clamp_eps <= 1e-6)) {
    throw std::invalid_argument("CriterionContext: clamp_eps must lie in (0, 1e-6]");
  }
  phi2_at_1_ = phi_.deriv2(1.0);
  admissible_ = model_.admissible_theta(phi_);
}

void CriterionContext::check_admissible(double theta) const {
  if (!admissible_.contains(theta)) {
    std::lock_guard<std::mutex> lock(mutex_);
    warnings_.insert("theta = " + std::to_string(theta) +
                     " outside the admissible range of (" + std::string(model_.name()) +
                     ", " + std::string(phi_.name) +
                     "); criterion evaluated on clamped densities");
  }
}

CriterionContext::ConstEntry& CriterionContext::entry(double theta) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_[theta];
}

double CriterionContext::k1_const(double theta) const {
  if (phi_.k1_identically_zero) return 0.0;
  ConstEntry& e = entry(theta);
  if (!std::isnan(e.k1)) return e.k1;
  check_admissible(theta);
  double acc = 0.0;
  for (int i = 0; i < rule_.order; ++i) {
    double row = 0.0;
    for (int j = 0; j < rule_.order; ++j) {
      const double c = clamp(model_.density(theta, rule_.nodes[i], rule_.nodes[j]));
      row += rule_.weights[j] * phi_.k1_centered(c);
    }
    acc += rule_.weights[i] * row;
  }
  e.k1 = acc;
  return acc;
}

std::array<double, 2> CriterionContext::k1_const_derivs(double theta) const {
  if (phi_.k1_identically_zero) return {0.0, 0.0};
  ConstEntry& e = entry(theta);
  if (!std::isnan(e.dk1)) return {e.dk1, e.d2k1};
  check_admissible(theta);
  const std::size_t m = static_cast<std::size_t>(rule_.order);
  std::vector<DensityDerivs> grid(m * m);
  model_.density_derivs_grid(theta, rule_.nodes, rule_.nodes, grid.data());
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const DensityDerivs& d = grid[i * m + j];
      // clamped nodes are frozen: the clamped integrand is constant there,
      // so its theta-derivative vanishes (keeps these the exact derivatives
      // of the clamped k1 quadrature)
      if (d.c < clamp_eps_) continue;
      const auto k = kernels(phi_, d.c, phi2_at_1_);
      r1 += rule_.weights[j] * k.Gp * d.dc_dtheta;
      r2 += rule_.weights[j] *
            (k.Gpp * d.dc_dtheta * d.dc_dtheta + k.Gp * d.d2c_dtheta2);
    }
    d1 += rule_.weights[i] * r1;
    d2 += rule_.weights[i] * r2;
  }
  e.dk1 = d1;
  e.d2k1 = d2;
  return {d1, d2};
}

double CriterionContext::m_value(double theta, double u1, double u2) const {
  const double k1 = k1_const(theta);
  double c = model_.density(theta, u1, u2);
  if (c < clamp_eps_) {
    if (std::isfinite(phi_.k2_at_zero)) return k1 - phi_.k2_at_zero;
    std::lock_guard<std::mutex> lock(mutex_);
    warnings_.insert("density clamped at an evaluation point of (" +
                     std::string(model_.name()) + ", " + std::string(phi_.name) + ")");
    c = clamp_eps_;
  }
  return k1 - phi_.k2(c);
}

double CriterionContext::dm_dtheta(double theta, const DensityDerivs& d) const {
  if (d.c < clamp_eps_) return k1_const_derivs(theta)[0];
  const auto k = kernels(phi_, d.c, phi2_at_1_);
  return k1_const_derivs(theta)[0] + k.B * d.dc_dtheta;
}

double CriterionContext::d2m_dtheta2(double theta, const DensityDerivs& d) const {
  if (d.c < clamp_eps_) return k1_const_derivs(theta)[1];
  const auto k = kernels(phi_, d.c, phi2_at_1_);
  return k1_const_derivs(theta)[1] + k.Bp * d.dc_dtheta * d.dc_dtheta +
         k.B * d.d2c_dtheta2;
}

double CriterionContext::dm_du(const DensityDerivs& d, int coord) const {
  if (d.c < clamp_eps_) return 0.0;
  const auto k = kernels(phi_, d.c, phi2_at_1_);
  return k.B * (coord == 1 ? d.dc_du1 : d.dc_du2);
}

double CriterionContext::d2m_dtheta_du(const DensityDerivs& d, int coord) const {
  if (d.c < clamp_eps_) return 0.0;
  const auto k = kernels(phi_, d.c, phi2_at_1_);
  const double cu = (coord == 1) ? d.dc_du1 : d.dc_du2;
  const double ctu = (coord == 1) ? d.d2c_dtheta_du1 : d.d2c_dtheta_du2;
  return k.Bp * d.dc_dtheta * cu + k.B * ctu;
}

CriterionContext::MDerivs CriterionContext::m_derivs(double theta, double u1,
                                                     double u2) const {
  const auto kd = k1_const_derivs(theta);
  const DensityDerivs d = model_.density_derivs(theta, u1, u2);
  MDerivs out{kd[0], kd[1], 0.0, 0.0, 0.0, 0.0};
  if (d.c < clamp_eps_) return out;  // frozen at the clamp
  const auto k = kernels(phi_, d.c, phi2_at_1_);
  out.dtheta += k.B * d.dc_dtheta;
  out.dtheta2 += k.Bp * d.dc_dtheta * d.dc_dtheta + k.B * d.d2c_dtheta2;
  out.du1 = k.B * d.dc_du1;
  out.du2 = k.B * d.dc_du2;
  out.dtheta_du1 = k.Bp * d.dc_dtheta * d.dc_du1 + k.B * d.d2c_dtheta_du1;
  out.dtheta_du2 = k.Bp * d.dc_dtheta * d.dc_du2 + k.B * d.d2c_dtheta_du2;
  return out;
}

double CriterionContext::empirical_criterion(const PseudoSample& sample,
                                             double theta) const {
  const double k1 = k1_const(theta);
  double acc = 0.0;
  for (const auto& p : sample.points) {
    const double c = model_.density(theta, p[0], p[1]);
    if (c < clamp_eps_) {
      if (!std::isfinite(phi_.k2_at_zero)) return -kInf;  // excluded theta
      acc += phi_.k2_at_zero;
    } else {
      acc += phi_.k2(c);
    }
  }
  return k1 - acc / static_cast<double>(sample.n);
}

CriterionContext::CritDerivs CriterionContext::empirical_criterion_derivs(
    const PseudoSample& sample, double theta) const {
  const auto kd = k1_const_derivs(theta);
  double g = 0.0, h = 0.0;
  for (const auto& p : sample.points) {
    const DensityDerivs d = model_.density_derivs(theta, p[0], p[1]);
    if (d.c < clamp_eps_) continue;  // frozen at the clamp
    const auto k = kernels(phi_, d.c, phi2_at_1_);
    g += k.B * d.dc_dtheta;
    h += k.Bp * d.dc_dtheta * d.dc_dtheta + k.B * d.d2c_dtheta2;
  }
  const double n = static_cast<double>(sample.n);
  return {kd[0] + g / n, kd[1] + h / n};
}

std::vector<std::string> CriterionContext::take_warnings() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> out(warnings_.begin(), warnings_.end());
  warnings_.clear();
  return out;
}

}  // namespace copdiv
