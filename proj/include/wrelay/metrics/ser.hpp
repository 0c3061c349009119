#ifndef WRELAY_METRICS_SER_HPP
#define WRELAY_METRICS_SER_HPP

#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/metrics/common.hpp"
#include "wrelay/metrics/qam.hpp"

namespace wrelay::metrics {

// I(A, B) = E[Q(A sqrt(gamma)) Q(B sqrt(gamma))] over the Weibull SNR.
// When one of A, B is zero the integral is E[Q(C sqrt(gamma))] / 2 with
// C = max(A, B). Both zero is rejected.
double ser_integral(double alpha, double phi, double A, double B, Mode mode = Mode::exact);

// E[Q(C sqrt(gamma))]
double ser_single_q(double alpha, double phi, double C, Mode mode = Mode::exact);
// E[Q(A sqrt(gamma)) Q(B sqrt(gamma))], A, B > 0
double ser_double_q(double alpha, double phi, double A, double B, Mode mode = Mode::exact);

// Square M-QAM: 4 w I(A) - 4 w^2 I(A, A), w = 1 - 1/sqrt(M).
double ser_hop(const HopSnr& hop, const QamCoefficients& q, Mode mode = Mode::exact);

// A symbol survives the route only if every hop detects it: 1 - prod (1 - s_i).
double ser_e2e(const std::vector<double>& per_hop);

double ser_chain(const std::vector<HopSnr>& hops, const QamCoefficients& q, Mode mode);

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_SER_HPP
