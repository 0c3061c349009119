#ifndef WRELAY_METRICS_BLER_HPP
#define WRELAY_METRICS_BLER_HPP

#include <vector>

#include "wrelay/channel.hpp"

namespace wrelay::metrics {

// Finite-blocklength parameters: rate in bits per channel use and block
// length l in channel uses.
struct BlerParams {
  double rate = 1.0;
  int block_length = 100;

  double gamma_th() const;  // 2^rate - 1
  // Slope of the normal approximation at gamma_th: 1 / sqrt(2 pi (2^(2 rate) - 1)).
  double lambda() const;
  double gamma_minus() const;  // gamma_th - 1 / (2 lambda sqrt(l)), may be negative
  double gamma_plus() const;

  void validate() const;
};

// Q((C(gamma) - rate) / sqrt(V(gamma) / l)), the normal approximation.
double bler_normal_conditional(double gamma, const BlerParams& p);
// Its three-piece linearisation around gamma_th.
double bler_linear_conditional(double gamma, const BlerParams& p);

// Average of the linearised block error over the Weibull SNR, in closed form.
// When gamma_minus <= 0 the lower limit is clamped at zero.
double bler_hop(const HopSnr& hop, const BlerParams& p);

// E(R_k) = E(R_{k-1}) + (1 - E(R_{k-1})) e_k
double bler_e2e(const std::vector<double>& per_hop);
// Same value through the alternating sum over all subsets.
double bler_e2e_inclusion_exclusion(const std::vector<double>& per_hop);

double bler_chain(const std::vector<HopSnr>& hops, const BlerParams& p);

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_BLER_HPP
