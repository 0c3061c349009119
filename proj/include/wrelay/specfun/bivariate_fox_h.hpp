#ifndef WRELAY_SPECFUN_BIVARIATE_FOX_H_HPP
#define WRELAY_SPECFUN_BIVARIATE_FOX_H_HPP

#include <cstddef>
#include <vector>

#include "wrelay/specfun/fox_h.hpp"

namespace wrelay::specfun {

// (a; A, B): enters the joint factor through Gamma(1 - a - A s - B t) or
// Gamma(a + A s + B t) depending on its position.
struct JointTerm {
  double shift;
  double scale_x;
  double scale_y;
};

// Two-variable H-function
//
//   H[x, y] = (1 / (2 pi i)^2) int int Phi(s, t) Theta_1(s) Theta_2(t) x^{-s} y^{-t} ds dt
//
//   Phi(s, t) = prod_{j<n1} Gamma(1 - a_j - A_j s - B_j t)
//             / ( prod_{j>=n1} Gamma(a_j + A_j s + B_j t)
//                 prod_j Gamma(1 - b_j - A_j s - B_j t) )   (joint_lower)
//
// and Theta_1, Theta_2 the single-variable kernels of `first` and `second`
// (see FoxHParams).
struct BivFoxHParams {
  std::size_t n1 = 0;
  std::vector<JointTerm> joint_upper;
  std::vector<JointTerm> joint_lower;
  FoxHParams first;
  FoxHParams second;

  void validate() const;
};

enum class BivMethod { automatic, reduced, contour2d, residue_series };

struct BivHValue {
  double value = 0.0;
  BivMethod method = BivMethod::automatic;
  ContourDiagnostics first;    // x contour (contour2d) or last term (residue_series)
  ContourDiagnostics second;   // y contour (contour2d only)
  std::size_t series_terms = 0;
  double estimated_rel_error = 0.0;
};

// Evaluates H[x, y] for x, y > 0.
//
// automatic: the double contour integral when the integrand decays
// exponentially in every direction of the (Im s, Im t) plane, otherwise the
// residue series over the left poles of Theta_2. When `second` is empty and
// every joint term has B = 0 the function reduces to a single H in x.
BivHValue bivariate_fox_h_eval(const BivFoxHParams& params, double x, double y,
                               BivMethod method = BivMethod::automatic);

inline double bivariate_fox_h(const BivFoxHParams& params, double x, double y) {
  return bivariate_fox_h_eval(params, x, y).value;
}

// Smallest exponential decay rate (in units of pi/2) of |Phi Theta_1 Theta_2|
// over all directions of the (Im s, Im t) plane.
double bivariate_min_decay(const BivFoxHParams& params);

}  // namespace wrelay::specfun

#endif  // WRELAY_SPECFUN_BIVARIATE_FOX_H_HPP
