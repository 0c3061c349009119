#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "oracle.hpp"
#include "wrelay/channel.hpp"
#include "wrelay/metrics/ber.hpp"
#include "wrelay/metrics/bler.hpp"
#include "wrelay/metrics/capacity.hpp"
#include "wrelay/metrics/energy.hpp"
#include "wrelay/metrics/outage.hpp"
#include "wrelay/metrics/qam.hpp"
#include "wrelay/metrics/ser.hpp"
#include "wrelay/specfun/errors.hpp"

using namespace wrelay;
using namespace wrelay::metrics;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

HopSnr snr(double alpha, double phi, double omega = 1.0) {
  HopSnr h;
  h.alpha = alpha;
  h.phi = phi;
  h.omega = omega;
  h.avg_snr = std::pow(phi, 1.0 / alpha) / (omega * omega);
  return h;
}

// Monte-Carlo BER of Gray-mapped square M-QAM over AWGN at per-bit SNR gb.
// Each axis is an independent Gray-coded sqrt(M)-PAM.
double qam_ber_symbol_mc(int M, double gb, int symbols, std::uint64_t seed) {
  const int L = static_cast<int>(std::lround(std::sqrt(M)));
  const int k = static_cast<int>(std::lround(std::log2(L)));
  const double es = 2.0 * (M - 1) / 3.0;  // average symbol energy, unit spacing 2
  const double eb = es / std::log2(M);
  const double sigma = std::sqrt(eb / gb / 2.0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, L - 1);
  std::normal_distribution<double> noise(0.0, sigma);
  auto gray = [](int i) { return i ^ (i >> 1); };
  long long errors = 0;
  for (int s = 0; s < symbols; ++s) {
    for (int axis = 0; axis < 2; ++axis) {
      const int i = level(rng);
      const double y = (2.0 * i - (L - 1)) + noise(rng);
      int j = static_cast<int>(std::lround((y + (L - 1)) / 2.0));
      j = std::clamp(j, 0, L - 1);
      errors += std::popcount(static_cast<unsigned>(gray(i) ^ gray(j)));
    }
  }
  return static_cast<double>(errors) / (static_cast<double>(symbols) * 2 * k);
}

}  // namespace

TEST_CASE("outage closed form and asymptote") {
  const std::vector<HopSnr> one{snr(1.0, 10.0)};
  CHECK(outage(one, 0.0) == 0.0);
  CHECK(outage(one, 1.0) == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-15));
  CHECK(outage(one, 1.0, Mode::asymptotic) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(outage(one, 1e-4) / outage(one, 1e-4, Mode::asymptotic) == doctest::Approx(1.0).epsilon(1e-4));

  // Monte-Carlo oracle with exponential draws.
  std::mt19937_64 rng(12345);
  std::exponential_distribution<double> e(1.0 / 10.0);
  const int n = 10'000'000;
  long long hits = 0;
  for (int i = 0; i < n; ++i) hits += e(rng) < 1.0;
  const double p = static_cast<double>(hits) / n;
  const double sd = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(p - outage(one, 1.0)) < 3.0 * sd);
}

TEST_CASE("outage invariants") {
  std::vector<HopSnr> hops{snr(1.0, 50.0), snr(2.0, 400.0), snr(0.7, 9.0)};
  double prev = 0.0;
  for (double g = 0.01; g < 20.0; g *= 1.7) {
    const double p = outage(hops, g);
    CHECK(p >= prev);
    CHECK(p <= 1.0);
    CHECK(outage(hops, g, Mode::asymptotic) == doctest::Approx(-std::log1p(-p)).epsilon(1e-12));
    prev = p;
  }
  auto longer = hops;
  longer.push_back(snr(1.5, 100.0));
  CHECK(outage(longer, 1.0) >= outage(hops, 1.0));
  std::vector<HopSnr> perm{hops[2], hops[0], hops[1]};
  CHECK(outage(perm, 1.0) == doctest::Approx(outage(hops, 1.0)).epsilon(1e-15));
}

TEST_CASE("hop-count floor") {
  CHECK(min_hops(100.0, 1.0, 1.0, 0.01) == 1);
  CHECK(min_hops(100.0, 1.0, 1.0, 0.05) == 5);
  CHECK(min_hops(100.0, 1.0, 1.0, 0.001) == 0);
}

TEST_CASE("QAM coefficients and AWGN BER") {
  CHECK(is_valid_qam_order(4));
  CHECK(is_valid_qam_order(64));
  CHECK_FALSE(is_valid_qam_order(8));
  CHECK_THROWS_AS(qam_coefficients(8), DomainError);

  CHECK(qam_ber_awgn(4, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  const auto q4 = qam_coefficients(4);
  REQUIRE(q4.levels.size() == 1);
  CHECK(qam_ber_awgn(4, 4.0) ==
        doctest::Approx(0.5 * std::erfc(std::sqrt(4.0 * q4.levels[0].omega[0]))).epsilon(1e-14));
  CHECK(qam_ber_awgn(16, 1e4) < 1e-300);

  const auto q16 = qam_coefficients(16);
  REQUIRE(q16.levels.size() == 2);
  CHECK(q16.levels[0].phi == std::vector<int>{1, 1});
  CHECK(q16.levels[1].phi == std::vector<int>{2, 1, -1});
  CHECK(q16.levels[0].omega[0] == doctest::Approx(0.4));
  CHECK(q16.levels[1].omega[2] == doctest::Approx(10.0));
}

TEST_CASE("QAM BER against Gray-mapped symbol simulation") {
  // 4-QAM at gamma_b = 4 and 16-QAM at gamma_b = 3 settle the SNR convention.
  for (auto [M, gb] : {std::pair{4, 4.0}, std::pair{16, 3.0}, std::pair{64, 10.0}}) {
    const int symbols = 1'000'000;
    const int k = static_cast<int>(std::log2(M));
    const double mc = qam_ber_symbol_mc(M, gb, symbols, 99 + M);
    const double ex = qam_ber_awgn(M, gb);
    const double sd = std::sqrt(ex * (1.0 - ex) / (static_cast<double>(symbols) * k)) *
                      std::sqrt(static_cast<double>(k));  // bits within a symbol are not independent
    INFO("M=" << M << " mc=" << mc << " exact=" << ex);
    CHECK(std::abs(mc - ex) < 4.0 * sd);
  }
}

TEST_CASE("zeta matches the Rayleigh closed form and quadrature") {
  CHECK(zeta(1.0, 10.0, 1.0) == doctest::Approx(1.0 - std::sqrt(10.0 / 11.0)).epsilon(1e-10));
  for (auto [a, p, w] : {std::tuple{2.0, 1e4, 1.0}, std::tuple{0.6, 3.0, 0.4},
                         std::tuple{2.7, 50.0, 3.6}, std::tuple{1.3, 1e5, 10.0}}) {
    const double ref = oracle::weibull_expectation(
        [w = w](double g) { return std::erfc(std::sqrt(w * g)); }, a, p);
    INFO("alpha=" << a << " phi=" << p << " omega=" << w);
    CHECK(rel(zeta(a, p, w), ref) < 1e-6);
  }
}

TEST_CASE("hop BER against quadrature and its asymptote") {
  for (int M : {4, 16, 64}) {
    const auto q = qam_coefficients(M);
    const HopSnr h = snr(2.0, 1e4);
    const double ref =
        oracle::weibull_expectation([&](double g) { return qam_ber_awgn(q, g); }, 2.0, 1e4);
    CHECK(rel(ber_hop(h, q), ref) < 1e-6);
  }
  const auto q = qam_coefficients(16);
  const double r1 = ber_hop(snr(1.5, 1e6), q) / ber_hop(snr(1.5, 1e6), q, Mode::asymptotic);
  const double r2 = ber_hop(snr(1.5, 1e12), q) / ber_hop(snr(1.5, 1e12), q, Mode::asymptotic);
  CHECK(std::abs(r2 - 1.0) < std::abs(r1 - 1.0));
  CHECK(r2 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("end-to-end BER recursion") {
  CHECK(ber_e2e({0.1}) == doctest::Approx(0.1));
  CHECK(ber_e2e({0.1, 0.1}) == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(ber_e2e({0.0, 0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(ber_e2e({0.6}), DomainError);
  // Two-level table collapses to the scalar recursion when every level is equal.
  CHECK(ber_e2e_levels({{0.1, 0.1}, {0.1, 0.1}}) == doctest::Approx(0.18));
}

TEST_CASE("diversity order is the smallest shape and matches the BER slope") {
  CHECK(diversity_order({snr(1, 1), snr(2, 1), snr(3, 1)}) == 1.0);
  CHECK(diversity_order({snr(1.7, 1), snr(1.7, 5)}) == 1.7);
  const auto q = qam_coefficients(4);
  const std::vector<double> alphas{1.0, 2.0, 2.5};
  auto ber_at = [&](double avg) {
    std::vector<HopSnr> hops;
    for (double a : alphas) hops.push_back(snr(a, std::pow(avg, a)));
    return ber_chain(hops, q, Mode::exact);
  };
  const double slope = -std::log10(ber_at(1e6) / ber_at(1e5));
  CHECK(slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("outdated CSI ratio density and zeta") {
  for (double a : {0.5, 1.0, 2.5}) {
    for (double rho : {0.0, 0.5, 0.95}) {
      const double mass =
          oracle::integrate_log([&](double z) { return outdated_ratio_pdf(z, a, rho); }, -80.0 / a,
                                80.0 / a);
      INFO("alpha=" << a << " rho=" << rho);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  CHECK(outdated_snr_cdf(1e300, 1.0, 1.0, 0.3) == doctest::Approx(1.0));
  CHECK_THROWS_AS(outdated_ratio_pdf(1.0, 1.0, 1.0), DomainError);

  auto quad = [](double a, double avg, double w, double rho) {
    return oracle::integrate_log(
        [&](double z) { return std::erfc(std::sqrt(w * avg * z)) * outdated_ratio_pdf(z, a, rho); },
        -80.0 / a, 80.0 / a);
  };
  // rho -> 0+ against quadrature and the exactly decoupled evaluation.
  for (auto [a, avg, w] : {std::tuple{1.0, 10.0, 1.0}, std::tuple{2.0, 100.0, 0.4},
                           std::tuple{0.8, 30.0, 3.6}}) {
    const double z0 = zeta_outdated(a, avg, w, 0.0);
    INFO("alpha=" << a << " avg=" << avg << " omega=" << w);
    CHECK(rel(z0, quad(a, avg, w, 0.0)) < 1e-4);
    CHECK(rel(zeta_outdated(a, avg, w, 1e-6), z0) < 1e-4);
  }
  // Interior correlation exercises the two-variable evaluation.
  CHECK(rel(zeta_outdated(1.0, 10.0, 1.0, 0.5), quad(1.0, 10.0, 1.0, 0.5)) < 1e-5);
  CHECK(rel(zeta_outdated(2.0, 100.0, 0.4, 0.95), quad(2.0, 100.0, 0.4, 0.95)) < 1e-5);
}

TEST_CASE("beamforming") {
  for (double c : {0.1, 0.5, 0.9}) CHECK(marchenko_pastur_mass(c) == doctest::Approx(1.0).epsilon(1e-6));
  const double c = 0.5;
  const double direct = oracle::integrate([&](double x) { return marchenko_pastur_density(x, c); },
                                          std::pow(1 - std::sqrt(c), 2), std::pow(1 + std::sqrt(c), 2));
  CHECK(direct == doctest::Approx(1.0).epsilon(1e-6));

  const auto q = qam_coefficients(16);
  // J against a direct quadrature of its defining integral.
  const double ap = 2.0, bp = 30.0, w = 0.4;
  const double jref = oracle::integrate(
      [&](double x) {
        return std::sqrt((1 - x / bp) * (x / ap - 1)) * std::erfc(std::sqrt(w * x)) / x;
      },
      ap, bp);
  CHECK(rel(beamforming_j(ap, bp, w), jref) < 1e-6);
  CHECK(beamforming_j(1e4, 1e5, 0.4) < 1e-300);

  for (double avg : {1.0, 10.0, 100.0, 1000.0}) {
    const HopSnr h = snr(1.0, avg);
    CHECK(ber_hop_beamforming(h, q, 16, 8) < ber_hop(h, q));
  }
  CHECK_THROWS_AS(ber_hop_beamforming(snr(1, 10), q, 8, 8), DomainError);
  std::string warn;
  ber_hop_beamforming(snr(1, 10), q, 16, 8, 2.0, &warn);
  CHECK_FALSE(warn.empty());
}

TEST_CASE("SER integrals against quadrature") {
  const double C = 1.3;
  for (auto [a, p] : {std::pair{1.0, 20.0}, std::pair{2.0, 500.0}, std::pair{0.7, 4.0}}) {
    const double ref1 =
        oracle::weibull_expectation([&](double g) { return oracle::q(C * std::sqrt(g)); }, a, p);
    CHECK(rel(ser_single_q(a, p, C), ref1) < 1e-6);
    const double ref2 = oracle::weibull_expectation(
        [&](double g) { return std::pow(oracle::q(C * std::sqrt(g)), 2); }, a, p);
    INFO("alpha=" << a << " phi=" << p);
    CHECK(rel(ser_double_q(a, p, C, C), ref2) < 1e-5);
  }
  CHECK(ser_integral(1.0, 20.0, 0.0, C) == doctest::Approx(ser_single_q(1.0, 20.0, C) / 2));
  CHECK_THROWS_AS(ser_integral(1.0, 20.0, 0.0, 0.0), DomainError);
}

TEST_CASE("hop SER against the square-QAM symbol error formula") {
  for (int M : {4, 16, 64}) {
    const auto q = qam_coefficients(M);
    const double k = std::log2(M);
    const double w = 1.0 - 1.0 / std::sqrt(M);
    auto pe = [&](double gb) {
      const double x = oracle::q(std::sqrt(3.0 * k * gb / (M - 1.0)));
      return 4.0 * w * x - 4.0 * w * w * x * x;
    };
    const double ref = oracle::weibull_expectation(pe, 1.5, 2000.0);
    INFO("M=" << M);
    CHECK(rel(ser_hop(snr(1.5, 2000.0), q), ref) < 1e-5);
  }
  // Dual hop: bounded by one and by the union bound; the 4 -> 16 gap is the largest.
  std::vector<double> gaps;
  double prev = 0.0;
  for (int M : {4, 16, 64, 256}) {
    const auto q = qam_coefficients(M);
    const std::vector<HopSnr> hops{snr(1.0, 200.0), snr(1.0, 200.0)};
    const double s = ser_chain(hops, q, Mode::exact);
    CHECK(s <= 1.0);
    CHECK(s <= 2.0 * ser_hop(hops[0], q));
    if (M > 4) gaps.push_back(std::log10(s) - std::log10(prev));
    prev = s;
  }
  CHECK(gaps[0] > gaps[1]);
  CHECK(gaps[0] > gaps[2]);
}

TEST_CASE("BLER") {
  CHECK(bler_e2e({0.1, 0.2}) == doctest::Approx(0.28).epsilon(1e-15));
  CHECK(bler_e2e({0.0, 0.0}) == 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> p(n);
    for (double& x : p) x = u(rng);
    CHECK(std::abs(bler_e2e(p) - bler_e2e_inclusion_exclusion(p)) < 1e-14);
  }

  BlerParams bp;
  bp.rate = 1.0;
  bp.block_length = 100;
  const HopSnr h = snr(1.0, 100.0);
  const double v = bler_hop(h, bp);
  const double linear = oracle::weibull_expectation(
      [&](double g) { return bler_linear_conditional(g, bp); }, 1.0, 100.0);
  // The linearised integrand has kinks at gamma_-/+; split there for the reference.
  auto pdf = [](double g) { return std::exp(-g / 100.0) / 100.0; };
  const double lin_split =
      oracle::integrate(pdf, 0.0, bp.gamma_minus()) +
      oracle::integrate([&](double g) { return bler_linear_conditional(g, bp) * pdf(g); },
                        bp.gamma_minus(), bp.gamma_plus());
  CHECK(rel(v, lin_split) < 1e-8);
  CHECK(rel(v, linear) < 1e-4);
  const double normal = oracle::weibull_expectation(
      [&](double g) { return bler_normal_conditional(g, bp); }, 1.0, 100.0);
  CHECK(rel(v, normal) < 0.10);

  bp.rate = 0.0;
  CHECK_THROWS_AS(bp.validate(), DomainError);
}

TEST_CASE("capacity") {
  for (double g : {0.5, 10.0, 1000.0}) {
    const double ref = std::exp(1.0 / g) * boost::math::expint(1, 1.0 / g) / std::numbers::ln2;
    CHECK(rel(capacity_hop(snr(1.0, g)), ref) < 1e-8);
  }
  for (auto [a, p] : {std::pair{2.5, 1e3}, std::pair{0.6, 7.0}}) {
    const double ref = oracle::weibull_expectation([](double g) { return std::log2(1.0 + g); }, a, p);
    CHECK(rel(capacity_hop(snr(a, p)), ref) < 1e-6);
  }
  const HopSnr h = snr(1.0, 1e6);
  CHECK(std::abs(capacity_hop(h) - capacity_hop(h, Mode::asymptotic)) < 0.01);
  CHECK(capacity_e2e({h, h, h}) == doctest::Approx(capacity_hop(h)));
  CHECK(capacity_e2e({h, snr(1.0, 10.0)}) == doctest::Approx(capacity_hop(snr(1.0, 10.0))));
}

TEST_CASE("energy efficiency") {
  const std::vector<HopSnr> hops{snr(1.0, 40.0), snr(1.0, 90.0)};
  const double psi = 1.0 / (1.0 / 40.0 + 1.0 / 90.0);
  const double ref = std::exp(1.0 / psi) * boost::math::expint(1, 1.0 / psi) / 2.0;
  CHECK(rel(ee_e2e(hops, 2.0), ref) < 1e-8);
  CHECK(ee_e2e(hops, 4.0) == doctest::Approx(ee_e2e(hops, 2.0) / 2.0).epsilon(1e-15));

  const std::vector<HopSnr> h2{snr(2.0, 1e3), snr(2.0, 3e3)};
  const double psi2 = 1.0 / (1.0 / 1e3 + 1.0 / 3e3);
  const double ref2 = oracle::weibull_expectation([](double g) { return std::log1p(g); }, 2.0, psi2);
  CHECK(rel(ee_e2e(h2, 1.0), ref2) < 1e-6);
  const std::vector<HopSnr> h3{snr(2.0, 1e12), snr(2.0, 3e12)};
  CHECK(ee_e2e(h3, 1.0, Mode::asymptotic) == doctest::Approx(ee_e2e(h3, 1.0)).epsilon(1e-6));

  CHECK_THROWS_AS(ee_e2e({snr(1.0, 10.0), snr(2.0, 10.0)}, 1.0), DomainError);
  PowerInventory inv;
  CHECK(inv.circuit_power(1) == doctest::Approx(0.5));
  HopChain c = uniform_chain(2, 100.0, WeibullHop{}, LinkBudget{});
  CHECK(total_power(c, inv) == doctest::Approx(1.0 + 2.0 * dbm_to_watts(23.0)));
}
