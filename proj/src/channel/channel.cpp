#include "wrelay/channel.hpp"

#include <cmath>
#include <string>

#include "wrelay/specfun/errors.hpp"

namespace wrelay {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void LinkBudget::validate() const {
  require(frequency_ghz > 0.0, "link budget: frequency must be positive");
  require(pathloss_exponent >= 1.0, "link budget: path-loss exponent must be >= 1");
  require(blockage_db_per_m >= 0.0, "link budget: blockage loss must be non-negative");
  require(std::isfinite(noise_psd_dbm_hz) && std::isfinite(noise_figure_db) &&
              std::isfinite(rx_frontend_loss_db) && std::isfinite(antenna_element_gain_db) &&
              std::isfinite(pathloss_ref_db_at_1m),
          "link budget: non-finite dB value");
}

void WeibullHop::validate() const {
  require(alpha > 0.0, "hop: alpha must be positive");
  require(omega > 0.0, "hop: omega must be positive");
  require(distance_m > 0.0, "hop: distance must be positive");
  require(bandwidth_hz > 0.0, "hop: bandwidth must be positive");
  require(extra_loss_factor > 0.0, "hop: extra loss factor must be positive");
  require(std::isfinite(tx_power_dbm), "hop: transmit power must be finite");
}

void HopChain::validate() const {
  require(!hops.empty(), "chain: at least one hop is required");
  budget.validate();
  for (const auto& h : hops) h.validate();
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db, double noise_psd_dbm_hz) {
  require(bandwidth_hz > 0.0, "noise power: bandwidth must be positive");
  return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double path_loss_db(const LinkBudget& budget, double distance_m) {
  require(distance_m > 0.0, "path loss: distance must be positive");
  return budget.pathloss_ref_db_at_1m + 10.0 * budget.pathloss_exponent * std::log10(distance_m) +
         20.0 * std::log10(budget.frequency_ghz / 28.0) + budget.blockage_db_per_m * distance_m;
}

double avg_snr_db(const WeibullHop& hop, const LinkBudget& budget) {
  return hop.tx_power_dbm - path_loss_db(budget, hop.distance_m) -
         noise_power_dbm(hop.bandwidth_hz, budget.noise_figure_db, budget.noise_psd_dbm_hz) -
         budget.rx_frontend_loss_db + budget.antenna_element_gain_db +
         10.0 * std::log10(hop.extra_loss_factor);
}

double avg_snr(const WeibullHop& hop, const LinkBudget& budget) {
  return std::pow(10.0, avg_snr_db(hop, budget) / 10.0);
}

double phi(const WeibullHop& hop, const LinkBudget& budget) {
  return phi_from(hop.alpha, avg_snr(hop, budget), hop.omega);
}

HopSnr hop_snr(const WeibullHop& hop, const LinkBudget& budget) {
  hop.validate();
  HopSnr s;
  s.alpha = hop.alpha;
  s.omega = hop.omega;
  s.avg_snr = avg_snr(hop, budget);
  s.phi = phi_from(hop.alpha, s.avg_snr, hop.omega);
  return s;
}

std::vector<HopSnr> chain_snr(const HopChain& chain) {
  chain.validate();
  std::vector<HopSnr> out;
  out.reserve(chain.size());
  for (const auto& h : chain.hops) out.push_back(hop_snr(h, chain.budget));
  return out;
}

double snr_per_watt(const WeibullHop& hop, const LinkBudget& budget) {
  WeibullHop one_watt = hop;
  one_watt.tx_power_dbm = 30.0;
  return avg_snr(one_watt, budget);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  require(watts > 0.0, "power must be positive");
  return 10.0 * std::log10(watts) + 30.0;
}

HopChain uniform_chain(std::size_t hops, double total_distance_m, const WeibullHop& proto,
                       const LinkBudget& budget) {
  require(hops >= 1, "chain: at least one hop is required");
  HopChain c;
  c.budget = budget;
  WeibullHop h = proto;
  h.distance_m = total_distance_m / static_cast<double>(hops);
  c.hops.assign(hops, h);
  c.validate();
  return c;
}

}  // namespace wrelay
