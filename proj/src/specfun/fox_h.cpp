#include "wrelay/specfun/fox_h.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/special.hpp"
#include "kernel.hpp"

namespace wrelay::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Successive trapezoid levels must agree to this before we stop refining.
constexpr double kRefineTol = 1e-13;
// Contract on the reported error estimate.
constexpr double kAcceptTol = 1e-8;
constexpr double kTailTol = 1e-16;
constexpr int kMaxLevels = 9;
constexpr double kMaxHalfLength = 4000.0;

class Integrand {
 public:
  Integrand(const FoxHParams& p, double z) : p_(p), log_z_(std::log(z)) {}

  // Subtracted from the exponent so that huge or tiny results stay representable.
  double log_scale = 0.0;

  cplx log_theta(cplx s) const { return detail::log_theta(p_, s); }

  cplx operator()(cplx s) const {
    ++evaluations;
    return detail::safe_exp(log_theta(s) - s * log_z_ - log_scale);
  }

  // log |f| at s, -inf when the integrand vanishes.
  double log_abs(cplx s) const {
    ++evaluations;
    const cplx e = log_theta(s) - s * log_z_;
    return e.real();
  }

  mutable std::size_t evaluations = 0;

 private:
  const FoxHParams& p_;
  double log_z_;
};

struct Strip {
  double left;   // max_j -b_j/B_j over j < m, or -inf
  double right;  // min_j (1-a_j)/A_j over j < n, or +inf
};

Strip separating_strip(const FoxHParams& p) {
  Strip s{-kInf, kInf};
  for (std::size_t j = 0; j < p.m; ++j)
    s.left = std::max(s.left, -p.lower[j].shift / p.lower[j].scale);
  for (std::size_t j = 0; j < p.n; ++j)
    s.right = std::min(s.right, (1.0 - p.upper[j].shift) / p.upper[j].scale);
  return s;
}

// Peak-magnitude proxy used to place the contour.
double contour_objective(const Integrand& f, double c) {
  double v = -kInf;
  for (double t : {0.0, 0.3}) {
    const double l = f.log_abs(cplx(c, t));
    if (std::isfinite(l)) v = std::max(v, l);
  }
  return std::isfinite(v) ? v : kInf;
}

double place_contour(const Integrand& f, const Strip& strip) {
  double lo, hi;
  if (std::isfinite(strip.left) && std::isfinite(strip.right)) {
    const double margin = std::min(0.1 * (strip.right - strip.left), 1.0);
    lo = strip.left + margin;
    hi = strip.right - margin;
  } else if (std::isfinite(strip.left)) {
    lo = strip.left + 0.25;
    hi = strip.left + 60.0;
  } else if (std::isfinite(strip.right)) {
    lo = strip.right - 60.0;
    hi = strip.right - 0.25;
  } else {
    lo = -30.0;
    hi = 30.0;
  }
  constexpr int kSamples = 161;
  double dx = 0.0;
  int best = 0;
  double best_v = kInf;
  // When the minimum sits on an open end of the window, slide the window.
  for (int slide = 0; slide < 12; ++slide) {
    dx = (hi - lo) / (kSamples - 1);
    best = 0;
    best_v = kInf;
    for (int i = 0; i < kSamples; ++i) {
      const double v = contour_objective(f, lo + i * dx);
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    const double width = hi - lo;
    if (best == kSamples - 1 && !std::isfinite(strip.right)) {
      lo = hi - 2.0 * dx;
      hi = lo + 2.0 * width;
    } else if (best == 0 && !std::isfinite(strip.left)) {
      hi = lo + 2.0 * dx;
      lo = hi - 2.0 * width;
    } else {
      break;
    }
  }
  if (!std::isfinite(best_v)) return 0.5 * (lo + hi);
  double a = lo + std::max(best - 1, 0) * dx;
  double b = lo + std::min(best + 1, kSamples - 1) * dx;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = contour_objective(f, x1), f2 = contour_objective(f, x2);
  for (int it = 0; it < 40 && b - a > 1e-6; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = contour_objective(f, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = contour_objective(f, x2);
    }
  }
  const double c = 0.5 * (a + b);
  return contour_objective(f, c) <= best_v ? c : lo + best * dx;
}

std::string describe(const FoxHParams& p, double z) {
  std::ostringstream os;
  os << "H^{" << p.m << ',' << p.n << "}_{" << p.p() << ',' << p.q() << "} at z=" << z;
  return os.str();
}

}  // namespace

void FoxHParams::validate() const {
  if (m > q() || n > p())
    throw DomainError("FoxHParams: orders must satisfy m <= q and n <= p");
  auto check = [](const std::vector<GammaTerm>& v) {
    for (const auto& t : v)
      if (!(t.scale > 0.0) || !std::isfinite(t.scale) || !std::isfinite(t.shift))
        throw DomainError("FoxHParams: scales must be positive and finite");
  };
  check(upper);
  check(lower);
}

namespace detail {

ScaledH fox_h_scaled(const FoxHParams& params, double z, double accept_tol) {
  params.validate();
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("fox_h: argument must be positive and finite");

  const Strip strip = separating_strip(params);
  if (!(strip.left < strip.right))
    throw ContourSeparationError("fox_h: pole families overlap for " + describe(params, z));
  if (!(detail::decay_rate(params) > 0.0))
    throw NonConvergenceError("fox_h: integrand does not decay along the contour for " +
                              describe(params, z));

  Integrand f(params, z);
  const double c = place_contour(f, strip);
  const double pole_gap = std::min(c - strip.left, strip.right - c);
  const double peak = f.log_abs(cplx(c, 0.0));
  f.log_scale = std::isfinite(peak) ? peak : 0.0;

  ScaledH out;
  out.log_scale = f.log_scale;
  auto& d = out.diagnostics;
  d.abscissa = c;

  // I = (1/pi) int_0^inf Re f(c + i t) dt by conjugate symmetry.
  double h = std::min(pole_gap / 3.0, 0.5);
  std::vector<double> re;
  re.push_back(f(cplx(c, 0.0)).real());
  double sum = 0.5 * re[0];
  double imag_sum = 0.0;

  // Coarse level: walk outward until the magnitude envelope has decayed.
  double window_max = std::abs(re[0]);
  double prev_window_max = kInf;
  double window_end = 1.0;
  double tail = kInf;
  double t = 0.0;
  for (std::size_t k = 1;; ++k) {
    t = k * h;
    const cplx v = f(cplx(c, t));
    const cplx w = f(cplx(c, -t));
    re.push_back(v.real());
    sum += v.real();
    imag_sum += v.imag() + w.imag();
    window_max = std::max(window_max, std::abs(v));
    if (t >= window_end) {
      const double integral = std::abs(sum * h / kPi);
      if (window_max < prev_window_max && t >= 2.0) {
        const double kappa = std::log(prev_window_max / window_max) / 1.0;
        const double est = window_max / (kappa * kPi);
        if (est <= kTailTol * integral || window_max == 0.0) {
          tail = est;
          break;
        }
      }
      prev_window_max = window_max;
      window_max = 0.0;
      window_end += 1.0;
    }
    if (t > kMaxHalfLength)
      throw NonConvergenceError("fox_h: contour tail did not decay for " +
                                describe(params, z));
  }
  const double half_length = t;
  double value = sum * h / kPi;
  d.imag_residual = std::abs(imag_sum * h / (2.0 * kPi));

  double rel_change = kInf;
  double prev_change = kInf;
  for (int level = 0; level < kMaxLevels; ++level) {
    const double hh = h / 2.0;
    std::vector<double> refined;
    refined.reserve(2 * re.size());
    double odd = 0.0;
    for (std::size_t k = 0; k + 1 < re.size(); ++k) {
      const double v = f(cplx(c, (2 * k + 1) * hh)).real();
      odd += v;
      refined.push_back(re[k]);
      refined.push_back(v);
    }
    refined.push_back(re.back());
    const double new_value = 0.5 * value + odd * hh / kPi;
    const double scale = std::max(std::abs(new_value), 1e-300);
    rel_change = std::abs(new_value - value) / scale;
    value = new_value;
    h = hh;
    re = std::move(refined);
    if (rel_change <= kRefineTol) break;
    // Rounding floor reached: further halving only adds noise.
    if (level >= 2 && rel_change > 0.3 * prev_change) break;
    prev_change = rel_change;
  }

  d.step = h;
  d.half_length = half_length;
  d.evaluations = f.evaluations;
  d.estimated_rel_error = rel_change + tail / std::max(std::abs(value), 1e-300);
  out.mantissa = value;

  if (!(d.estimated_rel_error <= accept_tol))
  {
    std::ostringstream os;
    os << "fox_h: estimated relative error " << d.estimated_rel_error << " (step " << d.step
       << ", abscissa " << c << ") for " << describe(params, z);
    throw NonConvergenceError(os.str());
  }
  if (d.imag_residual > 1e-8 * (1.0 + std::abs(value)))
    throw NonConvergenceError("fox_h: imaginary residual too large for " + describe(params, z));
  return out;
}

}  // namespace detail

HValue fox_h_eval(const FoxHParams& params, double z) {
  const detail::ScaledH s = detail::fox_h_scaled(params, z, kAcceptTol);
  HValue out;
  out.value = s.mantissa * std::exp(s.log_scale);
  out.diagnostics = s.diagnostics;
  out.diagnostics.imag_residual *= std::exp(s.log_scale);
  return out;
}

HValue meijer_g_eval(std::size_t m, std::size_t n, const std::vector<double>& a,
                     const std::vector<double>& b, double z) {
  FoxHParams p;
  p.m = m;
  p.n = n;
  for (double x : a) p.upper.push_back({x, 1.0});
  for (double x : b) p.lower.push_back({x, 1.0});
  return fox_h_eval(p, z);
}

}  // namespace wrelay::specfun
