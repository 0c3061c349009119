#ifndef WRELAY_SRC_SPECFUN_KERNEL_HPP
#define WRELAY_SRC_SPECFUN_KERNEL_HPP

// Internal helpers shared by the single and bivariate H evaluators.

#include <cmath>

#include "wrelay/specfun/fox_h.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::specfun::detail {

// log Theta(s) for a single-variable kernel.
inline cplx log_theta(const FoxHParams& p, cplx s) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < p.q(); ++j) {
    const auto& t = p.lower[j];
    if (j < p.m)
      acc += log_gamma(t.shift + t.scale * s);
    else
      acc -= log_gamma(1.0 - t.shift - t.scale * s);
  }
  for (std::size_t j = 0; j < p.p(); ++j) {
    const auto& t = p.upper[j];
    if (j < p.n)
      acc += log_gamma(1.0 - t.shift - t.scale * s);
    else
      acc -= log_gamma(t.shift + t.scale * s);
  }
  return acc;
}

// exp(e) with exp(-inf) mapped to an exact zero.
inline cplx safe_exp(cplx e) {
  if (std::isinf(e.real()) && e.real() < 0.0) return 0.0;
  return std::exp(e);
}

// Sum of numerator scales minus denominator scales.
inline double decay_rate(const FoxHParams& p) {
  double a = 0.0;
  for (std::size_t j = 0; j < p.p(); ++j) a += (j < p.n ? 1.0 : -1.0) * p.upper[j].scale;
  for (std::size_t j = 0; j < p.q(); ++j) a += (j < p.m ? 1.0 : -1.0) * p.lower[j].scale;
  return a;
}

// H value represented as mantissa * exp(log_scale).
struct ScaledH {
  double mantissa = 0.0;
  double log_scale = 0.0;
  ContourDiagnostics diagnostics;
};

// accept_tol: largest estimated relative error returned without throwing.
ScaledH fox_h_scaled(const FoxHParams& params, double z, double accept_tol);

inline bool is_pole(double x) { return x <= 0.0 && x == std::floor(x); }

inline bool near_pole(double x, double tol = 1e-12) {
  if (x > tol) return false;
  return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

}  // namespace wrelay::specfun::detail

#endif  // WRELAY_SRC_SPECFUN_KERNEL_HPP
