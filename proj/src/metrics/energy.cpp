#include "wrelay/metrics/energy.hpp"

#include <cmath>

#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/fox_h.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::metrics {

double PowerInventory::circuit_power(std::size_t hops) const {
  const double n = static_cast<double>(hops);
  return n * (tx + rx + mod + demod) + (n + 1.0) * idle;
}

void PowerInventory::validate() const {
  if (!(tx >= 0.0 && rx >= 0.0 && mod >= 0.0 && demod >= 0.0 && idle >= 0.0))
    throw DomainError("power inventory: circuit powers must be non-negative");
}

double total_power(const HopChain& chain, const PowerInventory& inv) {
  inv.validate();
  double p = inv.circuit_power(chain.size());
  for (const auto& h : chain.hops) p += dbm_to_watts(h.tx_power_dbm);
  return p;
}

double common_alpha(const std::vector<HopSnr>& hops) {
  if (hops.empty()) throw DomainError("energy efficiency: empty chain");
  const double a = hops.front().alpha;
  for (const auto& h : hops)
    if (std::abs(h.alpha - a) > 1e-12 * a)
      throw DomainError("energy efficiency: all hops must share one alpha");
  return a;
}

double ee_e2e(const std::vector<HopSnr>& hops, double total_power_w, Mode mode) {
  const double a = common_alpha(hops);
  if (!(total_power_w > 0.0)) throw DomainError("energy efficiency: total power must be positive");
  double inv_psi = 0.0;  // sum of 1 / phi_i
  for (const auto& h : hops) inv_psi += 1.0 / h.phi;
  if (mode == Mode::asymptotic)
    return (specfun::digamma(1.0) - std::log(inv_psi)) / (a * total_power_w);
  const specfun::FoxHParams p{2, 1, {{0.0, a}}, {{0.0, 1.0}, {0.0, a}}};
  return specfun::fox_h(p, inv_psi) / total_power_w;
}

double ee_e2e(const HopChain& chain, const PowerInventory& inv, Mode mode) {
  return ee_e2e(chain_snr(chain), total_power(chain, inv), mode);
}

}  // namespace wrelay::metrics
