#ifndef WRELAY_METRICS_BER_HPP
#define WRELAY_METRICS_BER_HPP

#include <string>
#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/metrics/common.hpp"
#include "wrelay/metrics/qam.hpp"

namespace wrelay::metrics {

// zeta = E[erfc(sqrt(omega gamma))] over the Weibull SNR (alpha, phi).
double zeta(double alpha, double phi, double omega);
// Leading high-SNR term: omega^-alpha Gamma(1/2 + alpha) / (sqrt(pi) phi).
double zeta_asymptotic(double alpha, double phi, double omega);

double ber_hop(const HopSnr& hop, const QamCoefficients& q, Mode mode = Mode::exact);

// Exact per-level hop BER: entry m-1 is the average BER of the level-m bits.
std::vector<double> ber_hop_levels(const HopSnr& hop, const QamCoefficients& q);

// Decode-and-forward combining sum_i p_i prod_{j>i} (1 - 2 p_j).
// Throws DomainError for inputs outside [0, 0.5].
double ber_e2e(const std::vector<double>& per_hop);

// The same combining applied separately to each bit level and then averaged;
// per_hop_levels[i][m] is the level-m BER of hop i.
double ber_e2e_levels(const std::vector<std::vector<double>>& per_hop_levels);

// exact: combining of exact hop BERs; asymptotic: sum of hop asymptotes.
double ber_chain(const std::vector<HopSnr>& hops, const QamCoefficients& q, Mode mode);

// min_i alpha_i
double diversity_order(const std::vector<HopSnr>& hops);

// ---------------------------------------------------------------------------
// Outdated channel estimate

// Density of G = |g|^2 / |g~|^2 for power correlation rho.
double outdated_ratio_pdf(double z, double alpha, double rho);

// CDF of the equalised SNR gamma~ = avg_snr G.
double outdated_snr_cdf(double gamma, double alpha, double avg_snr, double rho);

// E[erfc(sqrt(omega gamma~))] in closed form (bivariate H).
double zeta_outdated(double alpha, double avg_snr, double omega, double rho);

double ber_hop_outdated_csi(const HopSnr& hop, const QamCoefficients& q, double rho);

// ---------------------------------------------------------------------------
// Beamforming over t transmit and r < t receive antennas

// Continuous part of the limiting singular-value-squared density, normalised
// by the per-antenna average SNR: 1/(2 pi c s^2 x) sqrt((b - x)(x - a)).
double marchenko_pastur_density(double x, double c, double s = 1.0);
double marchenko_pastur_mass(double c, double s = 1.0);

// J = int_{a'}^{b'} sqrt((1 - x/b')(x/a' - 1)) erfc(sqrt(omega x)) / x dx
double beamforming_j(double a_prime, double b_prime, double omega);

// The per-stream average SNR is hop.avg_snr * omega^2. When the density mass
// deviates from one (s != 1) a message is written to *warning if given.
double ber_hop_beamforming(const HopSnr& hop, const QamCoefficients& q, int t, int r,
                           double s = 1.0, std::string* warning = nullptr);

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_BER_HPP
