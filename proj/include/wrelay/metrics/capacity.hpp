#ifndef WRELAY_METRICS_CAPACITY_HPP
#define WRELAY_METRICS_CAPACITY_HPP

#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/metrics/common.hpp"

namespace wrelay::metrics {

// E[log2(1 + gamma)] in bits/s/Hz.
double capacity_hop(const HopSnr& hop, Mode mode = Mode::exact);

// Minimum over hops.
double capacity_e2e(const std::vector<HopSnr>& hops, Mode mode = Mode::exact);

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_CAPACITY_HPP
