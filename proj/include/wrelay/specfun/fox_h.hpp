#ifndef WRELAY_SPECFUN_FOX_H_HPP
#define WRELAY_SPECFUN_FOX_H_HPP

#include <cstddef>
#include <vector>

namespace wrelay::specfun {

// One (shift, scale) pair, i.e. (a_j, A_j) or (b_j, B_j).
struct GammaTerm {
  double shift;
  double scale;
};

// H^{m,n}_{p,q}[z | upper; lower] with p = upper.size(), q = lower.size().
//
// Value = (1 / 2 pi i) int Theta(s) z^{-s} ds with
//   Theta(s) = prod_{j<m} Gamma(b_j + B_j s) prod_{j<n} Gamma(1 - a_j - A_j s)
//            / prod_{j>=m} Gamma(1 - b_j - B_j s) prod_{j>=n} Gamma(a_j + A_j s)
struct FoxHParams {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<GammaTerm> upper;
  std::vector<GammaTerm> lower;

  std::size_t p() const { return upper.size(); }
  std::size_t q() const { return lower.size(); }

  // Throws DomainError on inconsistent orders or non-positive scales.
  void validate() const;
};

struct ContourDiagnostics {
  double abscissa = 0.0;       // Re(s) of the vertical contour
  double step = 0.0;           // final trapezoid step in Im(s)
  double half_length = 0.0;    // truncation point in Im(s)
  std::size_t evaluations = 0;
  double estimated_rel_error = 0.0;
  double imag_residual = 0.0;  // |Im| of the full-line sum at the coarse level
};

struct HValue {
  double value = 0.0;
  ContourDiagnostics diagnostics;
};

// Evaluates H at z > 0 by trapezoidal quadrature along Re(s) = c.
//
// The abscissa c is the minimiser of the integrand magnitude on the real
// segment between the two pole families, which keeps cancellation small for
// extreme arguments. Throws ContourSeparationError when the pole families
// overlap and NonConvergenceError when the estimated relative error exceeds
// 1e-8.
HValue fox_h_eval(const FoxHParams& params, double z);

inline double fox_h(const FoxHParams& params, double z) {
  return fox_h_eval(params, z).value;
}

// Meijer G^{m,n}_{p,q}[z | a; b], i.e. Fox H with unit scales.
HValue meijer_g_eval(std::size_t m, std::size_t n, const std::vector<double>& a,
                     const std::vector<double>& b, double z);

inline double meijer_g(std::size_t m, std::size_t n, const std::vector<double>& a,
                       const std::vector<double>& b, double z) {
  return meijer_g_eval(m, n, a, b, z).value;
}

}  // namespace wrelay::specfun

#endif  // WRELAY_SPECFUN_FOX_H_HPP
