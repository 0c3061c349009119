#include "wrelay/metrics/bler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::metrics {

double BlerParams::gamma_th() const { return std::exp2(rate) - 1.0; }

double BlerParams::lambda() const {
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * (std::exp2(2.0 * rate) - 1.0));
}

double BlerParams::gamma_minus() const {
  return gamma_th() - 1.0 / (2.0 * lambda() * std::sqrt(static_cast<double>(block_length)));
}

double BlerParams::gamma_plus() const {
  return gamma_th() + 1.0 / (2.0 * lambda() * std::sqrt(static_cast<double>(block_length)));
}

void BlerParams::validate() const {
  if (!(rate > 0.0 && std::isfinite(rate))) throw DomainError("BLER: rate must be positive");
  if (block_length < 1) throw DomainError("BLER: block length must be >= 1");
}

double bler_normal_conditional(double gamma, const BlerParams& p) {
  if (gamma <= 0.0) return 1.0;
  const double log2e = std::numbers::log2e;
  const double c = std::log2(1.0 + gamma);
  const double v = gamma * (gamma + 2.0) / ((gamma + 1.0) * (gamma + 1.0)) * log2e * log2e;
  return specfun::q_function((c - p.rate) / std::sqrt(v / p.block_length));
}

double bler_linear_conditional(double gamma, const BlerParams& p) {
  if (gamma <= p.gamma_minus()) return 1.0;
  if (gamma >= p.gamma_plus()) return 0.0;
  return 0.5 - p.lambda() * std::sqrt(static_cast<double>(p.block_length)) * (gamma - p.gamma_th());
}

namespace {

// G(X) = int_0^X (1 - e^-x) x^(s-1) dx, computed without cancellation for
// small X.
double one_minus_exp_moment(double s, double X) {
  if (X <= 0.0) return 0.0;
  if (X < 1.0) {
    // sum_{k>=1} (-1)^(k+1) X^(k+s) / (k! (k+s))
    double term = X;  // X^k / k!
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
      const double add = term / (k + s);
      sum += (k % 2 == 1) ? add : -add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
      term *= X / (k + 1);
    }
    return sum * std::pow(X, s);
  }
  return std::pow(X, s) / s - boost::math::tgamma_lower(s, X);
}

}  // namespace

double bler_hop(const HopSnr& hop, const BlerParams& p) {
  p.validate();
  if (!(hop.alpha > 0.0 && hop.phi > 0.0)) throw DomainError("BLER: invalid hop");
  // lambda sqrt(l) int_{g-}^{g+} F(g) dg with F the Weibull CDF; the
  // substitution x = g^alpha / phi turns the integral into
  // (phi^(1/alpha) / alpha) [G(x+) - G(x-)].
  const double a = hop.alpha;
  const double s = 1.0 / a;
  const double gm = std::max(p.gamma_minus(), 0.0);
  const double gp = p.gamma_plus();
  const double xm = std::pow(gm, a) / hop.phi;
  const double xp = std::pow(gp, a) / hop.phi;
  const double inner = one_minus_exp_moment(s, xp) - one_minus_exp_moment(s, xm);
  const double v = p.lambda() * std::sqrt(static_cast<double>(p.block_length)) *
                   std::pow(hop.phi, s) / a * inner;
  return std::clamp(v, 0.0, 1.0);
}

double bler_e2e(const std::vector<double>& per_hop) {
  if (per_hop.empty()) throw DomainError("bler_e2e: empty chain");
  double e = 0.0;
  for (double x : per_hop) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("bler_e2e: hop BLER outside [0, 1]");
    e = e + (1.0 - e) * x;
  }
  return e;
}

double bler_e2e_inclusion_exclusion(const std::vector<double>& per_hop) {
  const std::size_t n = per_hop.size();
  if (n == 0) throw DomainError("bler_e2e: empty chain");
  if (n > 30) throw DomainError("bler_e2e_inclusion_exclusion: too many hops");
  double total = 0.0;
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    double prod = 1.0;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) {
        prod *= per_hop[i];
        ++bits;
      }
    total += (bits % 2 == 1) ? prod : -prod;
  }
  return total;
}

double bler_chain(const std::vector<HopSnr>& hops, const BlerParams& p) {
  std::vector<double> per;
  for (const auto& h : hops) per.push_back(bler_hop(h, p));
  return bler_e2e(per);
}

}  // namespace wrelay::metrics
