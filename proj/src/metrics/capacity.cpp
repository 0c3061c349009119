#include "wrelay/metrics/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/fox_h.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::metrics {

double capacity_hop(const HopSnr& hop, Mode mode) {
  const double a = hop.alpha;
  if (!(a > 0.0 && hop.phi > 0.0)) throw DomainError("capacity: invalid hop");
  if (mode == Mode::asymptotic)
    return (specfun::digamma(1.0) + std::log(hop.phi)) / (a * std::numbers::ln2);
  const specfun::FoxHParams p{3, 1, {{-a, a}, {1.0 - a, a}}, {{0.0, 1.0}, {-a, a}, {-a, a}}};
  const double h = specfun::fox_h(p, 1.0 / hop.phi);
  return std::max(a / (hop.phi * std::numbers::ln2) * h, 0.0);
}

double capacity_e2e(const std::vector<HopSnr>& hops, Mode mode) {
  if (hops.empty()) throw DomainError("capacity: empty chain");
  double c = capacity_hop(hops.front(), mode);
  for (std::size_t i = 1; i < hops.size(); ++i) c = std::min(c, capacity_hop(hops[i], mode));
  return c;
}

}  // namespace wrelay::metrics
