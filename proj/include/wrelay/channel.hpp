#ifndef WRELAY_CHANNEL_HPP
#define WRELAY_CHANNEL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace wrelay {

// Receiver-side link budget shared by all hops of a route.
struct LinkBudget {
  double frequency_ghz = 28.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 5.0;
  double rx_frontend_loss_db = 4.0;
  double antenna_element_gain_db = 5.0;
  double pathloss_exponent = 2.0;
  double pathloss_ref_db_at_1m = 61.34;  // free space at 1 m, 28 GHz
  double blockage_db_per_m = 0.0;        // extra distance-proportional loss, off by default

  void validate() const;
  bool operator==(const LinkBudget&) const = default;
};

// One hop. alpha is the SNR-domain Weibull shape (half the amplitude shape
// beta); the SNR CDF is 1 - exp(-gamma^alpha / phi) with
// phi = (avg_snr * omega^2)^alpha.
struct WeibullHop {
  double alpha = 1.0;
  double omega = 1.0;
  double distance_m = 100.0;
  double bandwidth_hz = 200e6;
  double tx_power_dbm = 23.0;       // EIRP of the transmitting node
  double extra_loss_factor = 1.0;   // linear gain multiplying the average SNR

  static WeibullHop from_beta(double beta) {
    WeibullHop h;
    h.alpha = beta / 2.0;
    return h;
  }

  void validate() const;
};

struct HopChain {
  std::vector<WeibullHop> hops;
  LinkBudget budget;

  std::size_t size() const { return hops.size(); }
  void validate() const;
};

// Statistics of one hop's SNR as consumed by the metrics.
struct HopSnr {
  double alpha = 1.0;
  double phi = 1.0;
  double avg_snr = 1.0;  // linear
  double omega = 1.0;
};

// -174 dBm/Hz + 10 log10(B) + NF, with the PSD overridable.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db,
                       double noise_psd_dbm_hz = -174.0);

// Close-in model: ref + 10 n log10(d / 1 m) + 20 log10(f / 28 GHz) + blockage.
double path_loss_db(const LinkBudget& budget, double distance_m);

double avg_snr_db(const WeibullHop& hop, const LinkBudget& budget);
double avg_snr(const WeibullHop& hop, const LinkBudget& budget);
double phi(const WeibullHop& hop, const LinkBudget& budget);

inline double phi_from(double alpha, double avg_snr_linear, double omega = 1.0) {
  return std::pow(avg_snr_linear * omega * omega, alpha);
}

HopSnr hop_snr(const WeibullHop& hop, const LinkBudget& budget);
std::vector<HopSnr> chain_snr(const HopChain& chain);

// Linear SNR obtained per watt of transmit power: avg_snr / P_tx.
double snr_per_watt(const WeibullHop& hop, const LinkBudget& budget);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Replicates one hop N times over an end-to-end distance split equally.
HopChain uniform_chain(std::size_t hops, double total_distance_m, const WeibullHop& proto,
                       const LinkBudget& budget);

}  // namespace wrelay

#endif  // WRELAY_CHANNEL_HPP
