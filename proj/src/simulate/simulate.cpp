#include "wrelay/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

#include "wrelay/metrics/ber.hpp"
#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

struct Moments {
  CompensatedSum s1, s2;
  std::uint64_t n = 0;
};

McEstimate finish(double mean, double var, std::uint64_t n, double sigma) {
  McEstimate e;
  e.mean = mean;
  e.trials_used = n;
  e.half_width = n > 1 ? sigma * std::sqrt(std::max(var, 0.0) / static_cast<double>(n)) : 0.0;
  e.resolved = e.half_width < std::abs(mean);
  return e;
}

void check_cfg(const McConfig& cfg) {
  if (cfg.trials < 1) throw DomainError("Monte-Carlo: trials must be >= 1");
  if (cfg.workers < 1) throw DomainError("Monte-Carlo: workers must be >= 1");
  if (!(cfg.confidence_sigma > 0.0)) throw DomainError("Monte-Carlo: confidence sigma must be positive");
}

void check_hops(const std::vector<HopSnr>& hops) {
  if (hops.empty()) throw DomainError("Monte-Carlo: empty chain");
  for (const auto& h : hops)
    if (!(h.alpha > 0.0 && h.phi > 0.0 && h.avg_snr > 0.0 && h.omega > 0.0))
      throw DomainError("Monte-Carlo: invalid hop statistics");
}

// ---------------------------------------------------------------------------
// Gray-mapped square QAM, each axis an independent sqrt(M)-PAM with levels
// 2i - (L - 1).

struct Qam {
  int L;             // levels per axis
  int bits;          // bits per symbol
  double sigma_unit; // noise std per dimension at unit per-bit (or per-symbol) SNR

  explicit Qam(const metrics::QamCoefficients& q) {
    L = static_cast<int>(std::lround(std::sqrt(static_cast<double>(q.M))));
    bits = 2 * q.bits_per_axis;
    const double es = 2.0 * (q.M - 1) / 3.0;
    sigma_unit = std::sqrt(es / (2.0 * q.snr_scale()));
  }
  double level(int i) const { return 2.0 * i - (L - 1); }
  int detect(double y) const {
    const int j = static_cast<int>(std::lround((y + (L - 1)) / 2.0));
    return std::clamp(j, 0, L - 1);
  }
  static int gray(int i) { return i ^ (i >> 1); }
};

double metric_cond_ber(const metrics::QamCoefficients& q, double gamma) {
  return metrics::qam_ber_awgn(q, gamma);
}

double e2e_ber(const std::vector<double>& p) {
  double total = 0.0, tail = 1.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    total += *it * tail;
    tail *= 1.0 - 2.0 * *it;
  }
  return total;
}

// Draws from the Marchenko-Pastur law (s = 1) by rejection.
struct MpSampler {
  double c, a, b, bound;
  explicit MpSampler(double ratio) : c(ratio) {
    const double rc = std::sqrt(c);
    a = (1.0 - rc) * (1.0 - rc);
    b = (1.0 + rc) * (1.0 + rc);
    bound = 0.0;
    for (int i = 1; i < 4000; ++i)
      bound = std::max(bound, metrics::marchenko_pastur_density(a + (b - a) * i / 4000.0, c));
    bound *= 1.05;
  }
  double operator()(Rng& rng) const {
    std::uniform_real_distribution<double> ux(a, b), uy(0.0, bound);
    for (;;) {
      const double x = ux(rng);
      if (uy(rng) <= metrics::marchenko_pastur_density(x, c)) return x;
    }
  }
};

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t worker) { return Rng(splitmix64(seed + worker)); }

double sample_unit_exponential(Rng& rng) {
  const double u = std::generate_canonical<double, 53>(rng);
  return -std::log1p(-u);
}

double sample_snr(const HopSnr& hop, Rng& rng) {
  return std::pow(hop.phi * sample_unit_exponential(rng), 1.0 / hop.alpha);
}

namespace {

// Complex Gaussian pair (h, h~) with E|h|^2 = E|h~|^2 = 1 and power
// correlation rho.
std::pair<std::complex<double>, std::complex<double>> gaussian_pair(double rho, Rng& rng) {
  std::normal_distribution<double> n(0.0, std::numbers::sqrt2 / 2.0);
  const std::complex<double> h(n(rng), n(rng));
  const std::complex<double> w(n(rng), n(rng));
  return {h, std::sqrt(rho) * h + std::sqrt(1.0 - rho) * w};
}

}  // namespace

std::pair<double, double> sample_correlated_snr_pair(const HopSnr& hop, double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("correlated pair: rho must be in [0, 1)");
  const auto [h, ht] = gaussian_pair(rho, rng);
  const double s = 1.0 / hop.alpha;
  return {std::pow(hop.phi * std::norm(h), s), std::pow(hop.phi * std::norm(ht), s)};
}

McEstimate run_trials(const McConfig& cfg, const std::function<double(Rng&)>& per_trial) {
  check_cfg(cfg);
  const unsigned W = cfg.workers;
  std::vector<Moments> parts(W);
  auto work = [&](unsigned w) {
    Rng rng = make_stream(cfg.seed, w);
    const std::uint64_t n = cfg.trials / W + (w < cfg.trials % W ? 1 : 0);
    Moments& m = parts[w];
    for (std::uint64_t i = 0; i < n; ++i) {
      const double x = per_trial(rng);
      m.s1.add(x);
      m.s2.add(x * x);
    }
    m.n = n;
  };
  const unsigned T = std::max(1u, std::min(cfg.threads, W));
  if (T == 1) {
    for (unsigned w = 0; w < W; ++w) work(w);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < T; ++t)
      pool.emplace_back([&, t] {
        for (unsigned w = t; w < W; w += T) work(w);
      });
    for (auto& th : pool) th.join();
  }
  CompensatedSum s1, s2;
  std::uint64_t n = 0;
  for (const auto& m : parts) {  // fixed order keeps the result independent of threads
    s1.add(m.s1.value());
    s2.add(m.s2.value());
    n += m.n;
  }
  const double mean = s1.value() / static_cast<double>(n);
  const double var =
      n > 1 ? (s2.value() - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1) : 0.0;
  return finish(mean, var, n, cfg.confidence_sigma);
}

McEstimate mc_outage(const std::vector<HopSnr>& hops, double gamma_th, const McConfig& cfg) {
  check_hops(hops);
  return run_trials(cfg, [&](Rng& rng) {
    double out = 0.0;
    for (const auto& h : hops)  // every hop is drawn so trials stay aligned
      if (sample_snr(h, rng) < gamma_th) out = 1.0;
    return out;
  });
}

McEstimate mc_ber(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                  const McConfig& cfg, BerMcMode mode) {
  check_hops(hops);
  if (mode == BerMcMode::analytic) {
    return run_trials(cfg, [&](Rng& rng) {
      std::vector<double> p(hops.size());
      for (std::size_t i = 0; i < hops.size(); ++i)
        p[i] = std::min(metric_cond_ber(q, sample_snr(hops[i], rng)), 0.5);
      return e2e_ber(p);
    });
  }
  const Qam qam(q);
  return run_trials(cfg, [&](Rng& rng) {
    std::uniform_int_distribution<int> pick(0, qam.L - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int src_i = pick(rng), src_q = pick(rng);
    int ci = src_i, cq = src_q;
    for (const auto& h : hops) {
      const double sigma = qam.sigma_unit / std::sqrt(sample_snr(h, rng));
      ci = qam.detect(qam.level(ci) + sigma * noise(rng));
      cq = qam.detect(qam.level(cq) + sigma * noise(rng));
    }
    const int errs = std::popcount(static_cast<unsigned>(Qam::gray(src_i) ^ Qam::gray(ci))) +
                     std::popcount(static_cast<unsigned>(Qam::gray(src_q) ^ Qam::gray(cq)));
    return static_cast<double>(errs) / qam.bits;
  });
}

McEstimate mc_ser(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                  const McConfig& cfg, BerMcMode mode) {
  check_hops(hops);
  if (mode == BerMcMode::analytic) {
    return run_trials(cfg, [&](Rng& rng) {
      double survive = 1.0;
      for (const auto& h : hops) survive *= 1.0 - metrics::qam_ser_awgn(q, sample_snr(h, rng));
      return 1.0 - survive;
    });
  }
  const Qam qam(q);
  return run_trials(cfg, [&](Rng& rng) {
    std::uniform_int_distribution<int> pick(0, qam.L - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int src_i = pick(rng), src_q = pick(rng);
    // Any hop in error counts, even if a later error maps the symbol back.
    bool err = false;
    int ci = src_i, cq = src_q;
    for (const auto& h : hops) {
      const double sigma = qam.sigma_unit / std::sqrt(sample_snr(h, rng));
      const int ni = qam.detect(qam.level(ci) + sigma * noise(rng));
      const int nq = qam.detect(qam.level(cq) + sigma * noise(rng));
      if (ni != ci || nq != cq) err = true;
      ci = ni;
      cq = nq;
    }
    return err ? 1.0 : 0.0;
  });
}

McEstimate mc_bler(const std::vector<HopSnr>& hops, const metrics::BlerParams& p,
                   const McConfig& cfg, BlerMcMode mode) {
  check_hops(hops);
  p.validate();
  return run_trials(cfg, [&](Rng& rng) {
    double survive = 1.0;
    for (const auto& h : hops) {
      const double g = sample_snr(h, rng);
      const double e = mode == BlerMcMode::linear ? metrics::bler_linear_conditional(g, p)
                                                  : metrics::bler_normal_conditional(g, p);
      survive *= 1.0 - e;
    }
    return 1.0 - survive;
  });
}

McEstimate mc_capacity(const std::vector<HopSnr>& hops, const McConfig& cfg) {
  check_hops(hops);
  McEstimate best;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    McConfig c = cfg;
    c.seed = splitmix64(cfg.seed + 0x51ed27ull * (i + 1));
    const auto& h = hops[i];
    const McEstimate e = run_trials(c, [&](Rng& rng) { return std::log2(1.0 + sample_snr(h, rng)); });
    if (i == 0 || e.mean < best.mean) best = e;
  }
  return best;
}

McEstimate mc_ee(const std::vector<HopSnr>& hops, double total_power_w, const McConfig& cfg) {
  check_hops(hops);
  if (!(total_power_w > 0.0)) throw DomainError("Monte-Carlo EE: total power must be positive");
  return run_trials(cfg, [&](Rng& rng) {
    double g = sample_snr(hops.front(), rng);
    for (std::size_t i = 1; i < hops.size(); ++i) g = std::min(g, sample_snr(hops[i], rng));
    return std::log1p(g) / total_power_w;
  });
}

McEstimate mc_ber_outdated(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                           double rho, const McConfig& cfg, BerMcMode mode) {
  check_hops(hops);
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("outdated CSI: rho must be in [0, 1)");
  if (mode == BerMcMode::analytic) {
    return run_trials(cfg, [&](Rng& rng) {
      std::vector<double> p(hops.size());
      for (std::size_t i = 0; i < hops.size(); ++i) {
        const auto [g, gt] = sample_correlated_snr_pair(hops[i], rho, rng);
        p[i] = std::min(metric_cond_ber(q, hops[i].avg_snr * g / gt), 0.5);
      }
      return e2e_ber(p);
    });
  }
  const Qam qam(q);
  return run_trials(cfg, [&](Rng& rng) {
    std::uniform_int_distribution<int> pick(0, qam.L - 1);
    std::normal_distribution<double> noise(0.0, qam.sigma_unit);
    const int src_i = pick(rng), src_q = pick(rng);
    int ci = src_i, cq = src_q;
    for (const auto& hop : hops) {
      const auto [h, ht] = gaussian_pair(rho, rng);
      // Weibull amplitude with the Gaussian's phase; |g|^2 is the
      // instantaneous SNR.
      const double s = 1.0 / (2.0 * hop.alpha);
      const std::complex<double> g = std::polar(std::pow(hop.phi * std::norm(h), s), std::arg(h));
      const std::complex<double> gt = std::polar(std::pow(hop.phi * std::norm(ht), s), std::arg(ht));
      const std::complex<double> x(qam.level(ci), qam.level(cq));
      const std::complex<double> y = g * x + std::complex<double>(noise(rng), noise(rng));
      const std::complex<double> z = y / gt;
      ci = qam.detect(z.real());
      cq = qam.detect(z.imag());
    }
    const int errs = std::popcount(static_cast<unsigned>(Qam::gray(src_i) ^ Qam::gray(ci))) +
                     std::popcount(static_cast<unsigned>(Qam::gray(src_q) ^ Qam::gray(cq)));
    return static_cast<double>(errs) / qam.bits;
  });
}

McEstimate mc_ber_beamforming(const std::vector<HopSnr>& hops, const metrics::QamCoefficients& q,
                              int t, int r, const McConfig& cfg) {
  check_hops(hops);
  if (!(r >= 1 && t >= 1 && r < t)) throw DomainError("beamforming: need 1 <= r < t");
  const MpSampler mp(static_cast<double>(r) / t);
  return run_trials(cfg, [&](Rng& rng) {
    std::vector<double> p(hops.size());
    for (std::size_t i = 0; i < hops.size(); ++i) {
      const double g = hops[i].avg_snr * hops[i].omega * hops[i].omega * mp(rng);
      p[i] = std::min(metric_cond_ber(q, g), 0.5);
    }
    return e2e_ber(p);
  });
}

}  // namespace wrelay::sim
