#include "wrelay/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay {

namespace {

double chain_alpha(const HopChain& chain) {
  chain.validate();
  const double a = chain.hops.front().alpha;
  for (const auto& h : chain.hops)
    if (std::abs(h.alpha - a) > 1e-12 * a)
      throw DomainError("allocation: all hops must share one alpha");
  return a;
}

double ber_constant(double alpha, const metrics::QamCoefficients& q) {
  double s = 0.0;
  for (const auto& t : q.collapsed()) s += t.weight * std::pow(t.omega, -alpha);
  return std::exp(std::lgamma(0.5 + alpha)) /
         (std::sqrt(std::numbers::pi * q.M) * q.bits_per_axis) * s;
}

// P_k = p_max / sum_i (a_i / a_k)^(1 / (alpha + 1))
std::vector<double> proportional_split(const std::vector<double>& a, double alpha, double p_max) {
  const double e = 1.0 / (alpha + 1.0);
  std::vector<double> p(a.size());
  if (std::all_of(a.begin(), a.end(), [&](double x) { return x == a.front(); })) {
    std::fill(p.begin(), p.end(), p_max / static_cast<double>(a.size()));
    return p;
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    double s = 0.0;
    for (double ai : a) s += std::pow(ai / a[k], e);
    p[k] = p_max / s;
  }
  // Remove the last-ulp drift of the sum without disturbing the ratios.
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x *= p_max / total;
  return p;
}

}  // namespace

std::vector<double> allocation_coefficients(const HopChain& chain) {
  const double alpha = chain_alpha(chain);
  std::vector<double> a;
  for (const auto& h : chain.hops) {
    const double g = snr_per_watt(h, chain.budget);
    a.push_back(std::pow(1.0 / (g * h.omega * h.omega), alpha));
  }
  return a;
}

double asymptotic_ber_objective(const std::vector<double>& a, double alpha,
                                const metrics::QamCoefficients& q,
                                const std::vector<double>& powers) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::pow(powers[i], -alpha);
  return ber_constant(alpha, q) * s;
}

double asymptotic_ee_objective(const std::vector<double>& a, double alpha, double total_power_w,
                               const std::vector<double>& powers) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::pow(powers[i], -alpha);
  return (specfun::digamma(1.0) - std::log(s)) / (alpha * total_power_w);
}

AllocationResult allocate_ber_optimal(const HopChain& chain, const metrics::QamCoefficients& q,
                                      double p_max) {
  if (!(p_max > 0.0)) throw DomainError("allocation: power budget must be positive");
  const double alpha = chain_alpha(chain);
  const auto a = allocation_coefficients(chain);
  const std::size_t n = a.size();
  AllocationResult r;
  r.powers = proportional_split(a, alpha, p_max);
  const double c = ber_constant(alpha, q);
  // Stationarity: alpha c a_i P_i^(-alpha-1) = lambda for every hop.
  r.multiplier = alpha * c * a[0] * std::pow(r.powers[0], -alpha - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = alpha * c * a[i] * std::pow(r.powers[i], -alpha - 1.0);
    r.kkt_residual = std::max(r.kkt_residual, std::abs(g - r.multiplier) / r.multiplier);
  }
  const std::vector<double> uniform(n, p_max / static_cast<double>(n));
  r.objective_before = asymptotic_ber_objective(a, alpha, q, uniform);
  r.objective_after = asymptotic_ber_objective(a, alpha, q, r.powers);
  return r;
}

AllocationResult allocate_ee_optimal(const HopChain& chain, const metrics::PowerInventory& inv,
                                     double p_max) {
  if (!(p_max > 0.0)) throw DomainError("allocation: power budget must be positive");
  inv.validate();
  const double alpha = chain_alpha(chain);
  const auto a = allocation_coefficients(chain);
  const std::size_t n = a.size();
  AllocationResult r;
  r.powers = proportional_split(a, alpha, p_max);
  const double p_total = inv.circuit_power(n) + p_max;
  const double e0 = 1.0 / p_total;
  r.multiplier = e0 / p_max;
  // a_j P_j^(-alpha-1) / sum_i a_i P_i^-alpha = lambda / E_0 for every hop.
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) denom += a[i] * std::pow(r.powers[i], -alpha);
  for (std::size_t j = 0; j < n; ++j) {
    const double lhs = a[j] * std::pow(r.powers[j], -alpha - 1.0) / denom;
    const double rhs = r.multiplier / e0;
    r.kkt_residual = std::max(r.kkt_residual, std::abs(lhs - rhs) / rhs);
  }
  const std::vector<double> uniform(n, p_max / static_cast<double>(n));
  r.objective_before = asymptotic_ee_objective(a, alpha, p_total, uniform);
  r.objective_after = asymptotic_ee_objective(a, alpha, p_total, r.powers);
  return r;
}

HopChain with_powers(const HopChain& chain, const std::vector<double>& powers) {
  if (powers.size() != chain.size()) throw DomainError("with_powers: size mismatch");
  HopChain c = chain;
  for (std::size_t i = 0; i < powers.size(); ++i) c.hops[i].tx_power_dbm = watts_to_dbm(powers[i]);
  return c;
}

}  // namespace wrelay
