#ifndef WRELAY_SIMULATE_HPP
#define WRELAY_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/metrics/bler.hpp"
#include "wrelay/metrics/qam.hpp"

namespace wrelay::sim {

struct McConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  double confidence_sigma = 3.0;
  // Trials are split over this many independent streams, seeded from
  // (seed, worker). The estimate depends on workers but not on threads.
  unsigned workers = 4;
  unsigned threads = 1;
};

struct McEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // confidence_sigma * standard error
  std::uint64_t trials_used = 0;
  bool resolved = true;     // false when half_width >= |mean|
};

using Rng = std::mt19937_64;

// Stream for one worker: mt19937_64 seeded with splitmix64(seed + worker).
Rng make_stream(std::uint64_t seed, std::uint64_t worker);

// Unit exponential by inversion, -ln(1 - U) with U in [0, 1).
double sample_unit_exponential(Rng& rng);

// gamma = (phi * E)^(1/alpha), E unit exponential.
double sample_snr(const HopSnr& hop, Rng& rng);

// (gamma, gamma_estimate): both marginally Weibull with the hop's law. The
// underlying complex Gaussians h and h~ = sqrt(rho) h + sqrt(1 - rho) w have
// power correlation rho.
std::pair<double, double> sample_correlated_snr_pair(const HopSnr& hop, double rho, Rng& rng);

// Runs per_trial over cfg.trials draws split across worker streams and
// pools the results with compensated summation.
McEstimate run_trials(const McConfig& cfg, const std::function<double(Rng&)>& per_trial);

enum class BerMcMode {
  analytic,  // conditional AWGN error rate per fading draw
  symbol,    // Gray-mapped QAM symbols, detection and regeneration at each relay
};

enum class BlerMcMode {
  linear,  // piecewise-linear conditional block error
  normal,  // normal approximation Q((C - R) / sqrt(V / l))
};

McEstimate mc_outage(const std::vector<HopSnr>& hops, double gamma_th, const McConfig& cfg);
McEstimate mc_ber(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                  const McConfig& cfg, BerMcMode mode = BerMcMode::analytic);
McEstimate mc_ser(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                  const McConfig& cfg, BerMcMode mode = BerMcMode::analytic);
McEstimate mc_bler(const std::vector<HopSnr>& hops, const metrics::BlerParams& p,
                   const McConfig& cfg, BlerMcMode mode = BlerMcMode::linear);
// min over hops of the per-hop mean of log2(1 + gamma); the half-width is
// that of the selected hop.
McEstimate mc_capacity(const std::vector<HopSnr>& hops, const McConfig& cfg);
// E[ln(1 + min_i gamma_i)] / P_T
McEstimate mc_ee(const std::vector<HopSnr>& hops, double total_power_w, const McConfig& cfg);

// Outdated CSI. analytic: conditional BER at avg_snr * gamma / gamma~ (the
// equalised SNR of the closed form). symbol: QAM symbols equalised with the
// stale complex channel estimate, so the residual phase and amplitude error
// of g / g~ acts on the constellation.
McEstimate mc_ber_outdated(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                           double rho, const McConfig& cfg, BerMcMode mode = BerMcMode::analytic);

// Beamforming: gamma = avg_snr * omega^2 * x with x drawn from the
// Marchenko-Pastur law of ratio r / t.
McEstimate mc_ber_beamforming(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                              int t, int r, const McConfig& cfg);

}  // namespace wrelay::sim

#endif  // WRELAY_SIMULATE_HPP
