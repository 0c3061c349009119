#include "wrelay/metrics/outage.hpp"

#include <cmath>

#include "wrelay/specfun/errors.hpp"

namespace wrelay::metrics {

double outage_exponent(const std::vector<HopSnr>& hops, double gamma_th) {
  if (!(gamma_th >= 0.0)) throw DomainError("outage: threshold must be non-negative");
  if (hops.empty()) throw DomainError("outage: empty chain");
  double s = 0.0;
  for (const auto& h : hops) s += std::pow(gamma_th, h.alpha) / h.phi;
  return s;
}

double outage(const std::vector<HopSnr>& hops, double gamma_th, Mode mode) {
  const double x = outage_exponent(hops, gamma_th);
  return mode == Mode::exact ? -std::expm1(-x) : x;
}

long long min_hops(double phi, double alpha, double gamma_th, double target) {
  if (!(target > 0.0 && target < 1.0)) throw DomainError("min_hops: target must be in (0, 1)");
  if (!(phi > 0.0 && alpha > 0.0 && gamma_th > 0.0))
    throw DomainError("min_hops: phi, alpha and threshold must be positive");
  return static_cast<long long>(std::floor(phi * target / std::pow(gamma_th, alpha)));
}

}  // namespace wrelay::metrics
