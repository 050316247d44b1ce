#pragma once

#include <span>
#include <string_view>

// phi-divergence generators. Each generator is a convex function phi with
// phi(1) = 0, phi'(1) = 0 and phi''(1) = 1, defined on an interval
// (a_phi, b_phi) containing 1. The dual criterion never needs phi itself at
// runtime; it consumes the c-space kernels below, where c is a copula
// density value and x = 1/c:
//
//   k1_centered(c) = phi'(1/c) + phi''(1) * (c - 1)
//   k2(c)          = phi'(1/c)/c - phi(1/c)
//
// k1_centered differs from phi'(1/c) by a term whose integral over the unit
// square vanishes exactly (the density integrates to 1), so both give the
// same criterion; the centered form is written so that the quadrature error
// of the density normalization cancels instead of biasing the sup. For the
// modified Kullback-Leibler generator it is identically zero and the
// criterion reduces to the pseudo-log-likelihood in exact arithmetic.

namespace copdiv {

enum class Divergence { kl, kl_m, chi2, chi2_m, hellinger };

struct PhiSpec {
  Divergence id;
  std::string_view name;

  // domain endpoints of phi, a_phi < 1 < b_phi (extended-real)
  double a_phi;
  double b_phi;
  bool closed_lower;  // hellinger extends continuously to x = 0

  double (*value)(double x);
  double (*deriv1)(double x);
  double (*deriv2)(double x);
  double (*deriv3)(double x);
  double (*conjugate)(double t);  // sup_x { t x - phi(x) }, +inf when unbounded

  // c-space kernels used by the criterion (c > 0)
  double (*k1_centered)(double c);
  double (*k2)(double c);
  bool k1_identically_zero;  // true for kl-m: skips the constant quadrature
  double k2_at_zero;         // limit of k2 as c -> 0+ (+inf for most generators)
  double k1_raw_at_zero;     // limit of |phi'(1/c)| as c -> 0+ (admissibility probe)
};

struct PhiEval {
  double value;
  double deriv1;
  double deriv2;
};

// Evaluates (phi, phi', phi'') at x. Throws std::domain_error when x lies
// outside the generator's domain (identifying the generator and x).
PhiEval evaluate(const PhiSpec& phi, double x);

// Convex conjugate phi*(t); +inf outside the effective domain.
double conjugate(const PhiSpec& phi, double t);

// The five built-in generators, stable order: kl, kl-m, chi2, chi2-m,
// hellinger. The L1 generator |x-1| is deliberately absent: it has no
// derivative at 1, so phi'(1/c) and the phi''(1) scaling of the test
// statistic are undefined for it.
std::span<const PhiSpec> builtins();

const PhiSpec& builtin(Divergence id);

// nullptr when the name is unknown; accepts the CLI spellings
// {kl, kl-m, chi2, chi2-m, hellinger}.
const PhiSpec* find_builtin(std::string_view name);

}  // namespace copdiv
