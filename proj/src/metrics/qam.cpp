#include "wrelay/metrics/qam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "wrelay/metrics/common.hpp"
#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::metrics {

std::string to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::asymptotic: return "asymptotic";
    case Method::monte_carlo: return "mc";
  }
  return "?";
}

bool is_valid_qam_order(int M) {
  if (M < 4) return false;
  int bits = 0;
  while ((1 << bits) < M) ++bits;
  return (1 << bits) == M && bits % 2 == 0;
}

QamCoefficients qam_coefficients(int M, SnrConvention convention) {
  if (!is_valid_qam_order(M))
    throw DomainError("M-QAM order " + std::to_string(M) +
                      " is not a perfect square power of two >= 4");
  QamCoefficients q;
  q.M = M;
  q.convention = convention;
  const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(M))));
  int k = 0;
  while ((1 << k) < root) ++k;
  q.bits_per_axis = k;
  const double scale = q.snr_scale();
  for (int m = 1; m <= k; ++m) {
    QamLevel level;
    level.m = m;
    level.nu = (root - (root >> m)) - 1;  // (1 - 2^-m) sqrt(M) - 1
    const int p = 1 << (m - 1);
    for (int n = 0; n <= level.nu; ++n) {
      const int fl = (n * p) / root;
      const int rnd = static_cast<int>(std::floor(static_cast<double>(n * p) / root + 0.5));
      const int sign = (fl % 2 == 0) ? 1 : -1;
      level.phi.push_back(sign * (p - rnd));
      const double odd = 2.0 * n + 1.0;
      level.omega.push_back(3.0 * odd * odd * scale / (2.0 * M - 2.0));
    }
    q.levels.push_back(std::move(level));
  }
  return q;
}

double QamCoefficients::normalisation() const {
  return 1.0 / (std::sqrt(static_cast<double>(M)) * bits_per_axis);
}

double QamCoefficients::snr_scale() const {
  return convention == SnrConvention::per_bit ? std::log2(static_cast<double>(M)) : 1.0;
}

std::vector<QamTerm> QamCoefficients::collapsed() const {
  std::map<int, QamTerm> by_n;
  for (const auto& level : levels)
    for (std::size_t n = 0; n < level.phi.size(); ++n) {
      auto it = by_n.find(static_cast<int>(n));
      if (it == by_n.end())
        by_n.emplace(static_cast<int>(n), QamTerm{level.omega[n], double(level.phi[n])});
      else
        it->second.weight += level.phi[n];
    }
  std::vector<QamTerm> out;
  for (const auto& [n, t] : by_n)
    if (t.weight != 0.0) out.push_back(t);
  return out;
}

double qam_ber_awgn(const QamCoefficients& q, double gamma) {
  if (gamma < 0.0) throw DomainError("qam_ber_awgn: SNR must be non-negative");
  double s = 0.0;
  for (const auto& t : q.collapsed()) s += t.weight * specfun::erfc(std::sqrt(t.omega * gamma));
  return std::clamp(s * q.normalisation(), 0.0, 1.0);
}

double qam_ber_awgn(int M, double gamma, SnrConvention convention) {
  return qam_ber_awgn(qam_coefficients(M, convention), gamma);
}

double qam_level_ber_awgn(const QamCoefficients& q, int m, double gamma) {
  if (m < 1 || m > q.bits_per_axis) throw DomainError("qam_level_ber_awgn: level out of range");
  const auto& level = q.levels[static_cast<std::size_t>(m - 1)];
  double s = 0.0;
  for (std::size_t n = 0; n < level.phi.size(); ++n)
    s += level.phi[n] * specfun::erfc(std::sqrt(level.omega[n] * gamma));
  return std::clamp(s / std::sqrt(static_cast<double>(q.M)), 0.0, 1.0);
}

double qam_ser_constant(const QamCoefficients& q) {
  return std::sqrt(3.0 * q.snr_scale() / (q.M - 1.0));
}

double qam_ser_awgn(const QamCoefficients& q, double gamma) {
  const double w = 1.0 - 1.0 / std::sqrt(static_cast<double>(q.M));
  const double p = specfun::q_function(qam_ser_constant(q) * std::sqrt(gamma));
  return 4.0 * w * p - 4.0 * w * w * p * p;
}

}  // namespace wrelay::metrics
