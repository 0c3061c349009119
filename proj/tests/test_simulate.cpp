#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wrelay/metrics/ber.hpp"
#include "wrelay/metrics/bler.hpp"
#include "wrelay/metrics/capacity.hpp"
#include "wrelay/metrics/energy.hpp"
#include "wrelay/metrics/outage.hpp"
#include "wrelay/metrics/ser.hpp"
#include "wrelay/simulate.hpp"

using namespace wrelay;
using namespace wrelay::sim;
namespace m = wrelay::metrics;

namespace {

HopSnr snr(double alpha, double phi) {
  HopSnr h;
  h.alpha = alpha;
  h.phi = phi;
  h.avg_snr = std::pow(phi, 1.0 / alpha);
  return h;
}

McConfig cfg(std::uint64_t trials, std::uint64_t seed = 11) {
  McConfig c;
  c.trials = trials;
  c.seed = seed;
  return c;
}

bool agrees(const McEstimate& e, double exact) {
  INFO("mc=" << e.mean << " +- " << e.half_width << " exact=" << exact);
  return std::abs(e.mean - exact) <= e.half_width;
}

}  // namespace

TEST_CASE("Weibull sampler: KS statistic, exponential mean and determinism") {
  const HopSnr h = snr(1.0, 10.0);
  const int n = 1'000'000;
  Rng rng = make_stream(5, 0);
  std::vector<double> x(n);
  for (double& v : x) v = sample_snr(h, rng);
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(-x[i] / 10.0);
    d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
  }
  // 1% critical value of the Kolmogorov distribution is 1.63 / sqrt(n).
  CHECK(d < 1.63 / std::sqrt(double(n)));

  double sum = 0.0, sum2 = 0.0;
  for (double v : x) {
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 10.0) < 3.0 * sd);

  Rng a = make_stream(77, 3), b = make_stream(77, 3), c = make_stream(77, 4);
  for (int i = 0; i < 100; ++i) CHECK(sample_snr(h, a) == sample_snr(h, b));
  CHECK(sample_snr(h, a) != sample_snr(h, c));
}

TEST_CASE("correlated pairs") {
  const HopSnr h = snr(1.0, 1.0);
  const int n = 1'000'000;
  SUBCASE("rho = 0 gives uncorrelated powers") {
    Rng rng = make_stream(1, 0);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const auto [x, y] = sample_correlated_snr_pair(h, 0.0, rng);
      sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
    }
    const double cov = sxy / n - sx / n * sy / n;
    const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    CHECK(std::abs(r) <= 3.0 / std::sqrt(double(n)));
  }
  SUBCASE("rho = 0.95 ratio histogram matches the ratio density") {
    Rng rng = make_stream(2, 0);
    const double rho = 0.95;
    // 40 bins equiprobable in log z between the 0.5% and 99.5% points.
    const int bins = 40;
    const double lo = std::log(0.2), hi = std::log(5.0);
    std::vector<int> count(bins, 0);
    for (int i = 0; i < n; ++i) {
      const auto [x, y] = sample_correlated_snr_pair(h, rho, rng);
      const double lz = std::log(x / y);
      if (lz <= lo || lz >= hi) continue;
      ++count[static_cast<int>((lz - lo) / (hi - lo) * bins)];
    }
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double z0 = std::exp(lo + (hi - lo) * b / bins);
      const double z1 = std::exp(lo + (hi - lo) * (b + 1) / bins);
      const double p = m::outdated_snr_cdf(z1, 1.0, 1.0, rho) - m::outdated_snr_cdf(z0, 1.0, 1.0, rho);
      const double e = p * n;
      chi2 += (count[b] - e) * (count[b] - e) / e;
    }
    // 99.9% point of chi-square with 40 degrees of freedom is 73.4.
    CHECK(chi2 < 73.4);
  }
  SUBCASE("rho -> 1 concentrates the ratio at one") {
    double prev = 1e9;
    for (double rho : {0.9, 0.99, 0.9999}) {
      Rng rng = make_stream(3, 0);
      double s = 0, s2 = 0;
      for (int i = 0; i < 100'000; ++i) {
        const auto [x, y] = sample_correlated_snr_pair(snr(2.0, 1.0), rho, rng);
        const double l = std::log(x / y);
        s += l;
        s2 += l * l;
      }
      const double var = s2 / 1e5 - (s / 1e5) * (s / 1e5);
      CHECK(var < prev);
      prev = var;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("estimates are deterministic and independent of the thread count") {
  const std::vector<HopSnr> hops{snr(1.0, 30.0), snr(2.0, 900.0)};
  auto c = cfg(200'000, 42);
  const auto a = mc_outage(hops, 1.0, c);
  const auto b = mc_outage(hops, 1.0, c);
  c.threads = 3;
  const auto t = mc_outage(hops, 1.0, c);
  CHECK(a.mean == b.mean);
  CHECK(a.half_width == b.half_width);
  CHECK(a.mean == t.mean);
  CHECK(a.trials_used == 200'000);
}

TEST_CASE("pooled worker streams agree with a single stream") {
  const std::vector<HopSnr> hops{snr(1.0, 30.0)};
  auto one = cfg(1'000'000, 9);
  one.workers = 1;
  auto many = one;
  many.workers = 16;
  const auto a = mc_outage(hops, 1.0, one);
  const auto b = mc_outage(hops, 1.0, many);
  CHECK(std::abs(a.mean - b.mean) <= std::hypot(a.half_width, b.half_width));
}

TEST_CASE("Monte-Carlo outage matches the closed form") {
  const std::vector<HopSnr> one{snr(1.0, 10.0)};
  CHECK(agrees(mc_outage(one, 1.0, cfg(10'000'000)), 1.0 - std::exp(-0.1)));
  const std::vector<HopSnr> three{snr(0.8, 40.0), snr(1.5, 100.0), snr(2.5, 2000.0)};
  CHECK(agrees(mc_outage(three, 2.0, cfg(1'000'000)), m::outage(three, 2.0)));
}

TEST_CASE("Monte-Carlo BER and SER match the closed forms") {
  const auto q4 = m::qam_coefficients(4);
  const auto q16 = m::qam_coefficients(16);
  const std::vector<HopSnr> one{snr(1.0, 1000.0)};
  CHECK(agrees(mc_ber(one, q4, cfg(1'000'000)), m::ber_hop(one[0], q4)));
  CHECK(agrees(mc_ber(one, q4, cfg(2'000'000), BerMcMode::symbol), m::ber_hop(one[0], q4)));

  const std::vector<HopSnr> two{snr(1.5, 3000.0), snr(2.0, 1e4)};
  CHECK(agrees(mc_ber(two, q16, cfg(1'000'000)), m::ber_chain(two, q16, m::Mode::exact)));
  // Symbol-level relaying tracks the per-level recursion.
  std::vector<std::vector<double>> levels;
  for (const auto& h : two) levels.push_back(m::ber_hop_levels(h, q16));
  CHECK(agrees(mc_ber(two, q16, cfg(2'000'000), BerMcMode::symbol), m::ber_e2e_levels(levels)));

  CHECK(agrees(mc_ser(two, q16, cfg(1'000'000)), m::ser_chain(two, q16, m::Mode::exact)));
  CHECK(agrees(mc_ser(two, q16, cfg(1'000'000), BerMcMode::symbol), m::ser_chain(two, q16, m::Mode::exact)));
}

TEST_CASE("Monte-Carlo BLER, capacity and EE match the closed forms") {
  const std::vector<HopSnr> hops{snr(1.0, 100.0), snr(1.0, 300.0)};
  m::BlerParams p;
  CHECK(agrees(mc_bler(hops, p, cfg(1'000'000)), m::bler_chain(hops, p)));

  const std::vector<HopSnr> same{snr(1.7, 500.0), snr(1.7, 500.0)};
  CHECK(agrees(mc_capacity(same, cfg(1'000'000)), m::capacity_e2e(same)));
  CHECK(agrees(mc_ee(hops, 2.5, cfg(1'000'000)), m::ee_e2e(hops, 2.5)));
}

TEST_CASE("Monte-Carlo outdated CSI and beamforming") {
  const auto q16 = m::qam_coefficients(16);
  const std::vector<HopSnr> two{snr(1.0, 100.0), snr(1.0, 100.0)};
  double exact = m::ber_e2e({m::ber_hop_outdated_csi(two[0], q16, 0.95),
                             m::ber_hop_outdated_csi(two[1], q16, 0.95)});
  CHECK(agrees(mc_ber_outdated(two, q16, 0.95, cfg(1'000'000)), exact));

  // A stale complex equaliser leaves an error floor as the SNR grows.
  const std::vector<HopSnr> hi{snr(1.0, 1e6)};
  const std::vector<HopSnr> hier{snr(1.0, 1e8)};
  const auto f1 = mc_ber_outdated(hi, q16, 0.95, cfg(400'000), BerMcMode::symbol);
  const auto f2 = mc_ber_outdated(hier, q16, 0.95, cfg(400'000), BerMcMode::symbol);
  CHECK(f2.mean > 0.5 * f1.mean);
  CHECK(f2.mean > 1e-3);

  exact = m::ber_e2e({m::ber_hop_beamforming(two[0], q16, 16, 8), m::ber_hop_beamforming(two[1], q16, 16, 8)});
  CHECK(agrees(mc_ber_beamforming(two, q16, 16, 8, cfg(1'000'000)), exact));
}

TEST_CASE("unresolved estimates are flagged") {
  const std::vector<HopSnr> one{snr(1.0, 1e9)};
  const auto e = mc_outage(one, 1.0, cfg(1000));
  CHECK_FALSE(e.resolved);
  CHECK_THROWS(mc_outage({}, 1.0, cfg(10)));
}
