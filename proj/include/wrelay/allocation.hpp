#ifndef WRELAY_ALLOCATION_HPP
#define WRELAY_ALLOCATION_HPP

#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/metrics/energy.hpp"
#include "wrelay/metrics/qam.hpp"

namespace wrelay {

struct AllocationResult {
  std::vector<double> powers;    // watts, one per hop, summing to p_max
  double multiplier = 0.0;       // Lagrange multiplier of the sum constraint
  double objective_before = 0.0; // surrogate objective at the uniform split
  double objective_after = 0.0;  // surrogate objective at the returned split
  double kkt_residual = 0.0;     // max relative stationarity residual
};

// Per-hop coefficient a_i = (1 / (g_i omega_i^2))^alpha, where g_i is the
// average SNR per watt of transmit power. Requires a common alpha.
std::vector<double> allocation_coefficients(const HopChain& chain);

// High-SNR BER surrogate sum_i c a_i P_i^-alpha with
// c = Gamma(1/2 + alpha) / (sqrt(pi M) log2 sqrt(M)) sum Phi omega^-alpha.
double asymptotic_ber_objective(const std::vector<double>& a, double alpha,
                                const metrics::QamCoefficients& q,
                                const std::vector<double>& powers);

// High-SNR EE surrogate (Psi(1) - ln sum_i a_i P_i^-alpha) / (alpha P_T).
double asymptotic_ee_objective(const std::vector<double>& a, double alpha, double total_power_w,
                               const std::vector<double>& powers);

// Minimises the BER surrogate subject to sum P_i = p_max.
AllocationResult allocate_ber_optimal(const HopChain& chain, const metrics::QamCoefficients& q,
                                      double p_max);

// Maximises the EE surrogate subject to sum P_i = p_max.
AllocationResult allocate_ee_optimal(const HopChain& chain, const metrics::PowerInventory& inv,
                                     double p_max);

// Copies the chain with each hop's transmit power set from powers (watts).
HopChain with_powers(const HopChain& chain, const std::vector<double>& powers);

}  // namespace wrelay

#endif  // WRELAY_ALLOCATION_HPP
