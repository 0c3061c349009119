#ifndef WRELAY_METRICS_OUTAGE_HPP
#define WRELAY_METRICS_OUTAGE_HPP

#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/metrics/common.hpp"

namespace wrelay::metrics {

// Sum over hops of gamma_th^alpha_i / phi_i.
double outage_exponent(const std::vector<HopSnr>& hops, double gamma_th);

// exact: 1 - exp(-sum gamma_th^alpha_i / phi_i); asymptotic: the sum itself.
double outage(const std::vector<HopSnr>& hops, double gamma_th, Mode mode = Mode::exact);

// Largest N with N gamma_th^alpha / phi <= target for identical hops, i.e.
// floor(phi target / gamma_th^alpha). Zero means the target is infeasible.
long long min_hops(double phi, double alpha, double gamma_th, double target);

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_OUTAGE_HPP
