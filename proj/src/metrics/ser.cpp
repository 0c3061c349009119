#include "wrelay/metrics/ser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wrelay/metrics/ber.hpp"
#include "wrelay/specfun/bivariate_fox_h.hpp"
#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/fox_h.hpp"

namespace wrelay::metrics {

namespace {

constexpr double kPi = std::numbers::pi;

void check(double alpha, double phi) {
  if (!(alpha > 0.0 && phi > 0.0)) throw DomainError("SER: alpha and phi must be positive");
}

}  // namespace

double ser_single_q(double alpha, double phi, double C, Mode mode) {
  check(alpha, phi);
  if (!(C > 0.0)) throw DomainError("SER: Q-function scale must be positive");
  // Q(C sqrt g) = erfc(sqrt(C^2 g / 2)) / 2
  const double omega = C * C / 2.0;
  return 0.5 * (mode == Mode::exact ? zeta(alpha, phi, omega)
                                    : zeta_asymptotic(alpha, phi, omega));
}

double ser_double_q(double alpha, double phi, double A, double B, Mode mode) {
  check(alpha, phi);
  if (!(A > 0.0 && B > 0.0)) throw DomainError("SER: both Q-function scales must be positive");
  if (mode == Mode::asymptotic) {
    // phi^-1 int Q(A sqrt g) Q(B sqrt g) alpha g^(alpha - 1) dg
    const double g = specfun::meijer_g(2, 2, {1.0 - alpha, 0.5 - alpha, 1.0},
                                       {0.0, 0.5, -alpha}, A * A / (B * B));
    return alpha / (4.0 * kPi) * std::pow(2.0 / (B * B), alpha) * g / phi;
  }
  // Q(x) = H^{2,0}_{1,2}[x^2 / 2 | (1,1); (0,1),(1/2,1)] / (2 sqrt(pi)), and
  // E[gamma^-(s+t)] = phi^(-(s+t)/alpha) Gamma(1 - (s+t)/alpha).
  specfun::BivFoxHParams p;
  p.n1 = 1;
  p.joint_upper = {{0.0, 1.0 / alpha, 1.0 / alpha}};
  p.first = specfun::FoxHParams{2, 0, {{1.0, 1.0}}, {{0.0, 1.0}, {0.5, 1.0}}};
  p.second = p.first;
  const double scale = std::pow(phi, 1.0 / alpha) / 2.0;
  const double h = specfun::bivariate_fox_h(p, A * A * scale, B * B * scale);
  return std::clamp(h / (4.0 * kPi), 0.0, 0.25);
}

double ser_integral(double alpha, double phi, double A, double B, Mode mode) {
  if (!(A >= 0.0 && B >= 0.0)) throw DomainError("SER: Q-function scales must be non-negative");
  if (A == 0.0 && B == 0.0) throw DomainError("SER: A and B cannot both be zero");
  if (A == 0.0 || B == 0.0) return 0.5 * ser_single_q(alpha, phi, std::max(A, B), mode);
  return ser_double_q(alpha, phi, A, B, mode);
}

double ser_hop(const HopSnr& hop, const QamCoefficients& q, Mode mode) {
  const double w = 1.0 - 1.0 / std::sqrt(static_cast<double>(q.M));
  const double A = qam_ser_constant(q);
  const double single = ser_single_q(hop.alpha, hop.phi, A, mode);
  const double dbl = ser_double_q(hop.alpha, hop.phi, A, A, mode);
  const double v = 4.0 * w * single - 4.0 * w * w * dbl;
  return mode == Mode::exact ? std::clamp(v, 0.0, 1.0) : v;
}

double ser_e2e(const std::vector<double>& per_hop) {
  if (per_hop.empty()) throw DomainError("ser_e2e: empty chain");
  double survive = 1.0;
  for (double s : per_hop) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("ser_e2e: hop SER outside [0, 1]");
    survive *= 1.0 - s;
  }
  return 1.0 - survive;
}

double ser_chain(const std::vector<HopSnr>& hops, const QamCoefficients& q, Mode mode) {
  if (hops.empty()) throw DomainError("ser_chain: empty chain");
  std::vector<double> per;
  for (const auto& h : hops) per.push_back(ser_hop(h, q, mode));
  if (mode == Mode::exact) return ser_e2e(per);
  double s = 0.0;
  for (double v : per) s += v;
  return s;
}

}  // namespace wrelay::metrics
