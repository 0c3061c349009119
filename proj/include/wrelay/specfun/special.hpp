#ifndef WRELAY_SPECFUN_SPECIAL_HPP
#define WRELAY_SPECFUN_SPECIAL_HPP

#include <complex>

namespace wrelay::specfun {

using cplx = std::complex<double>;

// Principal-ish branch of log Gamma(z). Only exp() of the result is used by
// the contour integrators, so the imaginary part is determined modulo 2*pi.
// Returns +inf (real part) at the poles.
cplx log_gamma(cplx z);

// Gamma(z) for complex z. Throws PoleError at non-positive integers.
cplx complex_gamma(cplx z);

// Psi_0(x) for x > 0. Throws DomainError otherwise.
double digamma(double x);

// Upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1) e^-t dt.
double upper_incomplete_gamma(double s, double x);

// Complementary error function.
double erfc(double x);

// Q(x) = erfc(x / sqrt 2) / 2.
double q_function(double x);

}  // namespace wrelay::specfun

#endif  // WRELAY_SPECFUN_SPECIAL_HPP
