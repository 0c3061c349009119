#include "wrelay/specfun/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "wrelay/specfun/errors.hpp"

namespace wrelay::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// B_{2k} / (2k (2k - 1)) for k = 1..10
constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,          1.0 / 1260.0,
    -1.0 / 1680.0,       1.0 / 1188.0,          -691.0 / 360360.0,
    1.0 / 156.0,         -3617.0 / 122400.0,    43867.0 / 244188.0,
    -174611.0 / 125400.0};

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// log(sin(pi z)), stable for large |Im z|.
cplx log_sin_pi(cplx z) {
  // sin(pi z) has period 2 in Re z; reduce exactly first.
  double x = z.real() - 2.0 * std::round(z.real() / 2.0);
  const double y = z.imag();
  if (std::abs(y) < 20.0) return std::log(std::sin(kPi * cplx(x, y)));
  if (y < 0.0) return std::conj(log_sin_pi(cplx(x, -y)));
  // sin(pi z) = e^{-i pi z} (1 - e^{2 i pi z}) / (2i)
  const cplx w(x, y);
  const cplx i(0.0, 1.0);
  return -i * kPi * w - std::log(2.0 * i) + std::log(1.0 - std::exp(2.0 * i * kPi * w));
}

}  // namespace

cplx log_gamma(cplx z) {
  if (is_nonpositive_integer(z)) return {kInf, 0.0};
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);
  }
  cplx shift = 1.0;
  while (std::abs(z) < 10.0) {
    shift *= z;
    z += 1.0;
  }
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx pw = inv;
  for (double c : kStirling) {
    series += c * pw;
    pw *= inv2;
  }
  const cplx stirling =
      (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
  return stirling - std::log(shift);
}

cplx complex_gamma(cplx z) {
  if (is_nonpositive_integer(z))
    throw PoleError("complex_gamma: pole at z = " + std::to_string(z.real()));
  return std::exp(log_gamma(z));
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("digamma: argument must be positive and finite");
  return boost::math::digamma(x);
}

double upper_incomplete_gamma(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw DomainError("upper_incomplete_gamma: s must be positive");
  if (!(x >= 0.0))
    throw DomainError("upper_incomplete_gamma: x must be non-negative");
  if (std::isinf(x)) return 0.0;
  return boost::math::tgamma(s, x);
}

double erfc(double x) { return std::erfc(x); }

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace wrelay::specfun
