#ifndef WRELAY_METRICS_QAM_HPP
#define WRELAY_METRICS_QAM_HPP

#include <vector>

namespace wrelay::metrics {

// per_bit: the SNR argument of every QAM formula is Eb/N0 (the omega_n
// coefficients carry the log2 M factor). per_symbol: it is Es/N0.
enum class SnrConvention { per_bit, per_symbol };

// Coefficients of the exact Gray-coded square M-QAM bit error rate over AWGN,
//   P_b(gamma) = 1/(sqrt(M) k) sum_m sum_{n=0}^{nu_m} Phi_{m,n} erfc(sqrt(omega_n gamma)),
// with k = log2 sqrt(M) and m = 1..k.
struct QamLevel {
  int m = 1;
  int nu = 0;
  std::vector<int> phi;        // Phi_{m,n}, n = 0..nu
  std::vector<double> omega;   // omega_n, n = 0..nu
};

struct QamTerm {
  double omega;
  double weight;  // sum of Phi_{m,n} over levels sharing omega_n
};

struct QamCoefficients {
  int M = 4;
  int bits_per_axis = 1;
  SnrConvention convention = SnrConvention::per_bit;
  std::vector<QamLevel> levels;

  // 1 / (sqrt(M) log2 sqrt(M))
  double normalisation() const;
  // Terms merged by n, so each erfc / zeta is evaluated once.
  std::vector<QamTerm> collapsed() const;
  // Symbol-SNR per unit of the SNR argument: log2 M (per_bit) or 1.
  double snr_scale() const;
};

bool is_valid_qam_order(int M);

// Throws DomainError unless M is an even power of two >= 4.
QamCoefficients qam_coefficients(int M, SnrConvention convention = SnrConvention::per_bit);

// Exact AWGN bit error rate, clipped to [0, 1].
double qam_ber_awgn(const QamCoefficients& q, double gamma);
double qam_ber_awgn(int M, double gamma, SnrConvention convention = SnrConvention::per_bit);

// Bit error rate of the bits at level m (1-based), i.e. P_b(gamma, m) scaled
// so that the average over levels equals qam_ber_awgn.
double qam_level_ber_awgn(const QamCoefficients& q, int m, double gamma);

// Exact AWGN symbol error rate of square M-QAM.
double qam_ser_awgn(const QamCoefficients& q, double gamma);

// Q-function argument scale: SER terms are Q(A sqrt(gamma)) with
// A = sqrt(3 s / (M - 1)), s = snr_scale().
double qam_ser_constant(const QamCoefficients& q);

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_QAM_HPP
