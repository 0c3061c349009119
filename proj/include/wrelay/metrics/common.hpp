#ifndef WRELAY_METRICS_COMMON_HPP
#define WRELAY_METRICS_COMMON_HPP

#include <cstdint>
#include <string>

namespace wrelay::metrics {

enum class Mode { exact, asymptotic };

enum class Method { exact, asymptotic, monte_carlo };

std::string to_string(Method m);

// A metric value tagged with how it was obtained.
struct MetricResult {
  double value = 0.0;
  Method method = Method::exact;
  double half_width = 0.0;      // Monte-Carlo confidence half-width, 0 otherwise
  std::uint64_t trials = 0;     // Monte-Carlo trials, 0 otherwise
  bool resolved = true;         // false when half_width >= |value| for Monte-Carlo
};

}  // namespace wrelay::metrics

#endif  // WRELAY_METRICS_COMMON_HPP
