#ifndef WRELAY_METRICS_ENERGY_HPP
#define WRELAY_METRICS_ENERGY_HPP

#include <cstddef>
#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/metrics/common.hpp"

namespace wrelay::metrics {

// Circuit power of one node in watts. N hops have N transmit/modulate and N
// receive/demodulate stages and N + 1 idle nodes.
struct PowerInventory {
  double tx = 0.2;
  double rx = 0.2;
  double mod = 0.05;
  double demod = 0.05;
  double idle = 0.0;

  double circuit_power(std::size_t hops) const;
  void validate() const;
};

// P_c + sum of the hops' transmit powers.
double total_power(const HopChain& chain, const PowerInventory& inv);

// E[ln(1 + min_i gamma_i)] / P_T in nats/s/Hz per watt. All hops must share
// one alpha (DomainError otherwise).
double ee_e2e(const std::vector<HopSnr>& hops, double total_power_w, Mode mode = Mode::exact);
double ee_e2e(const HopChain& chain, const PowerInventory& inv, Mode mode = Mode::exact);

// Rejects chains with distinct alphas.
double common_alpha(const std::vector<HopSnr>& hops);

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_ENERGY_HPP
