#include "wrelay/metrics/ber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wrelay/specfun/bivariate_fox_h.hpp"
#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/fox_h.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::metrics {

namespace {

using specfun::BivFoxHParams;
using specfun::FoxHParams;

constexpr double kPi = std::numbers::pi;

void check_snr(double alpha, double phi, double omega) {
  if (!(alpha > 0.0 && phi > 0.0 && omega > 0.0))
    throw DomainError("zeta: alpha, phi and omega must be positive");
}

// Gamma(u) Gamma(a - a u) Gamma(1/2 + a - a u) / Gamma(1 + a - a u)
FoxHParams zeta_kernel(double a) {
  return FoxHParams{1, 2, {{1.0 - a, a}, {0.5 - a, a}}, {{0.0, 1.0}, {-a, a}}};
}

}  // namespace

double zeta(double alpha, double phi, double omega) {
  check_snr(alpha, phi, omega);
  // E[erfc(sqrt(w g))] = (a x / sqrt(pi)) H[x], x = w^-a / phi
  const double log_x = -alpha * std::log(omega) - std::log(phi);
  const double x = std::exp(log_x);
  const double h = specfun::fox_h(zeta_kernel(alpha), x);
  return std::clamp(alpha * x * h / std::sqrt(kPi), 0.0, 1.0);
}

double zeta_asymptotic(double alpha, double phi, double omega) {
  check_snr(alpha, phi, omega);
  return std::exp(std::lgamma(0.5 + alpha) - alpha * std::log(omega) - std::log(phi)) /
         std::sqrt(kPi);
}

double ber_hop(const HopSnr& hop, const QamCoefficients& q, Mode mode) {
  double s = 0.0;
  for (const auto& t : q.collapsed())
    s += t.weight * (mode == Mode::exact ? zeta(hop.alpha, hop.phi, t.omega)
                                         : zeta_asymptotic(hop.alpha, hop.phi, t.omega));
  const double v = s * q.normalisation();
  return mode == Mode::exact ? std::clamp(v, 0.0, 0.5) : v;
}

std::vector<double> ber_hop_levels(const HopSnr& hop, const QamCoefficients& q) {
  std::vector<double> z;  // zeta by n
  std::vector<double> out;
  for (const auto& level : q.levels) {
    double s = 0.0;
    for (std::size_t n = 0; n < level.phi.size(); ++n) {
      if (n >= z.size()) z.push_back(zeta(hop.alpha, hop.phi, level.omega[n]));
      s += level.phi[n] * z[n];
    }
    out.push_back(std::clamp(s / std::sqrt(static_cast<double>(q.M)), 0.0, 0.5));
  }
  return out;
}

double ber_e2e(const std::vector<double>& per_hop) {
  if (per_hop.empty()) throw DomainError("ber_e2e: empty chain");
  double total = 0.0;
  // Walk backwards so the product over later hops accumulates in one pass.
  double tail = 1.0;
  for (auto it = per_hop.rbegin(); it != per_hop.rend(); ++it) {
    const double p = *it;
    if (!(p >= 0.0 && p <= 0.5)) throw DomainError("ber_e2e: hop BER outside [0, 0.5]");
    total += p * tail;
    tail *= 1.0 - 2.0 * p;
  }
  return total;
}

double ber_e2e_levels(const std::vector<std::vector<double>>& per_hop_levels) {
  if (per_hop_levels.empty()) throw DomainError("ber_e2e_levels: empty chain");
  const std::size_t k = per_hop_levels.front().size();
  double s = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    std::vector<double> column;
    for (const auto& hop : per_hop_levels) {
      if (hop.size() != k) throw DomainError("ber_e2e_levels: ragged level table");
      column.push_back(hop[m]);
    }
    s += ber_e2e(column);
  }
  return s / static_cast<double>(k);
}

double ber_chain(const std::vector<HopSnr>& hops, const QamCoefficients& q, Mode mode) {
  if (hops.empty()) throw DomainError("ber_chain: empty chain");
  std::vector<double> per;
  for (const auto& h : hops) per.push_back(ber_hop(h, q, mode));
  if (mode == Mode::exact) return ber_e2e(per);
  double s = 0.0;
  for (double p : per) s += p;
  return s;
}

double diversity_order(const std::vector<HopSnr>& hops) {
  if (hops.empty()) throw DomainError("diversity_order: empty chain");
  double a = hops.front().alpha;
  for (const auto& h : hops) a = std::min(a, h.alpha);
  return a;
}

// ---------------------------------------------------------------------------

double outdated_ratio_pdf(double z, double alpha, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("outdated CSI: rho must be in [0, 1)");
  if (z <= 0.0) return 0.0;
  const double u = std::pow(z, alpha);
  return alpha * (1.0 - rho) * (u / z) * (u + 1.0) /
         std::pow(u * u + (2.0 - 4.0 * rho) * u + 1.0, 1.5);
}

double outdated_snr_cdf(double gamma, double alpha, double avg_snr, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("outdated CSI: rho must be in [0, 1)");
  if (gamma <= 0.0) return 0.0;
  // Written in u = (gamma / avg_snr)^alpha to stay finite for large arguments.
  const double u = std::pow(gamma / avg_snr, alpha);
  const double b = 2.0 - 4.0 * rho;
  if (u > 1.0) {
    const double v = 1.0 / u;
    return 0.5 + 0.5 * (1.0 - v) / std::sqrt(1.0 + b * v + v * v);
  }
  return 0.5 + 0.5 * (u - 1.0) / std::sqrt(u * u + b * u + 1.0);
}

double zeta_outdated(double alpha, double avg_snr, double omega, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("outdated CSI: rho must be in [0, 1)");
  check_snr(alpha, avg_snr, omega);
  const double delta = std::pow(omega * avg_snr, -alpha);
  if (rho == 0.0) {
    // The second variable drops out; only its t = 0 residue survives.
    const FoxHParams single{1, 3, {{1.0 - alpha, alpha}, {0.5 - alpha, alpha}, {-1.0, 1.0}},
                            {{0.0, 1.0}, {-alpha, alpha}}};
    return std::clamp(alpha * delta / std::sqrt(kPi) * specfun::fox_h(single, delta), 0.0, 1.0);
  }
  BivFoxHParams p;
  p.n1 = 3;
  p.joint_upper = {{1.0 - alpha, alpha, alpha}, {0.5 - alpha, alpha, alpha}, {-1.0, 1.0, 2.0}};
  p.joint_lower = {{-alpha, alpha, alpha}};
  p.first = FoxHParams{1, 0, {}, {{0.0, 1.0}}};
  p.second = FoxHParams{1, 0, {{0.5, 1.0}}, {{0.0, 1.0}, {0.0, 1.0}, {0.5, 1.0}}};
  const double h = specfun::bivariate_fox_h(p, delta, rho * delta);
  return std::clamp(std::sqrt(kPi) * (1.0 - rho) * alpha * delta * h, 0.0, 1.0);
}

double ber_hop_outdated_csi(const HopSnr& hop, const QamCoefficients& q, double rho) {
  double s = 0.0;
  for (const auto& t : q.collapsed())
    s += t.weight * zeta_outdated(hop.alpha, hop.avg_snr, t.omega, rho);
  return std::clamp(s * q.normalisation(), 0.0, 0.5);
}

// ---------------------------------------------------------------------------

namespace {

struct MpSupport {
  double a, b;
};

MpSupport mp_support(double c) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("beamforming: need 0 < r/t < 1");
  const double rc = std::sqrt(c);
  return {(1.0 - rc) * (1.0 - rc), (1.0 + rc) * (1.0 + rc)};
}

}  // namespace

double marchenko_pastur_density(double x, double c, double s) {
  const auto [a, b] = mp_support(c);
  if (x <= a || x >= b) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * kPi * c * s * s * x);
}

double marchenko_pastur_mass(double c, double s) {
  const auto [a, b] = mp_support(c);
  // x = a + (b - a) sin^2(theta) removes the square-root endpoints.
  auto f = [&](double th) {
    const double sn = std::sin(th), cs = std::cos(th);
    const double x = a + (b - a) * sn * sn;
    return 2.0 * (b - a) * (b - a) * sn * sn * cs * cs / x;
  };
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, kPi / 2, 15, 1e-13);
  return v / (2.0 * kPi * c * s * s);
}

double beamforming_j(double a_prime, double b_prime, double omega) {
  if (!(a_prime > 0.0 && b_prime > a_prime && omega > 0.0))
    throw DomainError("beamforming_j: need 0 < a' < b' and omega > 0");
  const double w = b_prime - a_prime;
  const double norm = std::sqrt(a_prime * b_prime);
  auto f = [&](double th) {
    const double sn = std::sin(th), cs = std::cos(th);
    const double x = a_prime + w * sn * sn;
    return 2.0 * w * w * sn * sn * cs * cs / (norm * x) * specfun::erfc(std::sqrt(omega * x));
  };
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, kPi / 2, 15,
                                                                        1e-12);
}

double ber_hop_beamforming(const HopSnr& hop, const QamCoefficients& q, int t, int r, double s,
                           std::string* warning) {
  if (!(r >= 1 && t >= 1 && r < t)) throw DomainError("beamforming: need 1 <= r < t");
  if (!(s > 0.0)) throw DomainError("beamforming: s must be positive");
  const double c = static_cast<double>(r) / t;
  const auto [a, b] = mp_support(c);
  const double mass = marchenko_pastur_mass(c, s);
  if (warning && std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "beamforming: density integrates to " << mass
       << " for s = " << s << "; the 1/s^2 factor of the density is ambiguous";
    *warning = os.str();
  }
  const double g = hop.avg_snr * hop.omega * hop.omega;
  const double pref = std::sqrt(a * b) / (2.0 * kPi * c * s * s);
  double sum = 0.0;
  for (const auto& term : q.collapsed())
    sum += term.weight * pref * beamforming_j(a * g, b * g, term.omega);
  return std::clamp(sum * q.normalisation(), 0.0, 0.5);
}

}  // namespace wrelay::metrics
