#include "wrelay/specfun/bivariate_fox_h.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "kernel.hpp"
#include "wrelay/specfun/errors.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

constexpr double kAcceptTol = 1e-6;
constexpr double kSeriesTol = 1e-12;
constexpr std::size_t kMaxSeriesTerms = 4000;
constexpr std::size_t kMaxEvaluations = 60'000'000;

bool is_reducible(const BivFoxHParams& p) {
  if (p.second.p() != 0 || p.second.q() != 0) return false;
  for (const auto& t : p.joint_upper)
    if (t.scale_y != 0.0) return false;
  for (const auto& t : p.joint_lower)
    if (t.scale_y != 0.0) return false;
  return true;
}

// ----------------------------------------------------------------------------
// Structural reduction

HValue reduce_to_single(const BivFoxHParams& p, double x) {
  FoxHParams h;
  for (std::size_t j = 0; j < p.n1; ++j)
    h.upper.push_back({p.joint_upper[j].shift, p.joint_upper[j].scale_x});
  for (std::size_t j = 0; j < p.first.n; ++j) h.upper.push_back(p.first.upper[j]);
  for (std::size_t j = p.n1; j < p.joint_upper.size(); ++j)
    h.upper.push_back({p.joint_upper[j].shift, p.joint_upper[j].scale_x});
  for (std::size_t j = p.first.n; j < p.first.p(); ++j) h.upper.push_back(p.first.upper[j]);
  h.n = p.n1 + p.first.n;
  h.lower = p.first.lower;
  for (const auto& t : p.joint_lower) h.lower.push_back({t.shift, t.scale_x});
  h.m = p.first.m;
  return fox_h_eval(h, x);
}

// ----------------------------------------------------------------------------
// Residue series over the left poles of Theta_2

// Single-variable kernel in s obtained by freezing t at a real value.
FoxHParams freeze_second(const BivFoxHParams& p, double t) {
  FoxHParams h;
  for (std::size_t j = 0; j < p.n1; ++j) {
    const auto& q = p.joint_upper[j];
    h.upper.push_back({q.shift + q.scale_y * t, q.scale_x});
  }
  for (std::size_t j = 0; j < p.first.n; ++j) h.upper.push_back(p.first.upper[j]);
  for (std::size_t j = p.n1; j < p.joint_upper.size(); ++j) {
    const auto& q = p.joint_upper[j];
    h.upper.push_back({q.shift + q.scale_y * t, q.scale_x});
  }
  for (std::size_t j = p.first.n; j < p.first.p(); ++j) h.upper.push_back(p.first.upper[j]);
  h.n = p.n1 + p.first.n;
  h.lower = p.first.lower;
  for (const auto& q : p.joint_lower) h.lower.push_back({q.shift + q.scale_y * t, q.scale_x});
  h.m = p.first.m;
  return h;
}

struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;
  bool zero = false;
};

// Accumulates +-log|Gamma(arg)|. A numerator pole means two pole families of
// the second variable coincide, which the series cannot handle.
void add_gamma(SignedLog& acc, double arg, bool numerator) {
  if (detail::near_pole(arg)) {
    if (numerator)
      throw ContourSeparationError(
          "bivariate_fox_h: coincident poles in the second variable (not supported)");
    acc.zero = true;
    return;
  }
  int sg = 1;
  const double lg = boost::math::lgamma(arg, &sg);
  acc.log_abs += numerator ? lg : -lg;
  acc.sign *= sg;
}

BivHValue residue_series(const BivFoxHParams& p, double x, double y) {
  const FoxHParams& sec = p.second;
  const double log_y = std::log(y);
  BivHValue out;
  out.method = BivMethod::residue_series;
  double total = 0.0;
  double tail_total = 0.0;
  double weighted_error = 0.0;

  for (std::size_t fam = 0; fam < sec.m; ++fam) {
    const double b = sec.lower[fam].shift;
    const double B = sec.lower[fam].scale;
    double family = 0.0;
    double prev_abs = kInf;
    int shrinking = 0;
    double tail = kInf;
    int zero_run = 0;
    for (std::size_t k = 0;; ++k) {
      if (k >= kMaxSeriesTerms)
        throw NonConvergenceError("bivariate_fox_h: residue series did not converge");
      const double t = -(b + static_cast<double>(k)) / B;
      SignedLog c;
      c.log_abs = -std::lgamma(static_cast<double>(k) + 1.0) - std::log(B) - t * log_y;
      c.sign = (k % 2 == 0) ? 1 : -1;
      for (std::size_t j = 0; j < sec.q(); ++j) {
        if (j == fam) continue;
        const auto& q = sec.lower[j];
        if (j < sec.m)
          add_gamma(c, q.shift + q.scale * t, true);
        else
          add_gamma(c, 1.0 - q.shift - q.scale * t, false);
      }
      for (std::size_t j = 0; j < sec.p(); ++j) {
        const auto& q = sec.upper[j];
        if (j < sec.n)
          add_gamma(c, 1.0 - q.shift - q.scale * t, true);
        else
          add_gamma(c, q.shift + q.scale * t, false);
      }
      double term = 0.0;
      if (!c.zero) {
        // Late terms carry little weight, so their own accuracy may be looser;
        // the weighted error is accumulated below.
        const detail::ScaledH hk = detail::fox_h_scaled(freeze_second(p, t), x, 1e-4);
        out.first = hk.diagnostics;
        if (hk.mantissa != 0.0) {
          const double mag =
              std::exp(c.log_abs + hk.log_scale + std::log(std::abs(hk.mantissa)));
          term = (hk.mantissa < 0.0 ? -c.sign : c.sign) * mag;
          weighted_error += mag * hk.diagnostics.estimated_rel_error;
        }
      }
      ++out.series_terms;
      family += term;
      const double a = std::abs(term);
      if (c.zero) {
        // A denominator Gamma that keeps hitting its poles terminates the
        // family (e.g. Gamma(t) / Gamma(1 + t)).
        if (++zero_run >= 64) {
          tail = 0.0;
          break;
        }
        continue;
      }
      zero_run = 0;
      if (a == 0.0 && k > 0) {
        tail = 0.0;
        break;
      }
      shrinking = (a < prev_abs) ? shrinking + 1 : 0;
      if (shrinking >= 3) {
        const double r = a / prev_abs;
        const double est = a * r / (1.0 - r);
        if (est <= kSeriesTol * std::abs(family)) {
          tail = est;
          break;
        }
      }
      prev_abs = a;
    }
    total += family;
    tail_total += tail;
  }

  out.value = total;
  out.estimated_rel_error =
      (tail_total + weighted_error) / std::max(std::abs(total), 1e-300);
  if (!(out.estimated_rel_error <= kAcceptTol))
    throw NonConvergenceError("bivariate_fox_h: residue series error estimate " +
                              std::to_string(out.estimated_rel_error));
  return out;
}

// ----------------------------------------------------------------------------
// Double contour integral

// k0 + k1 Re(s) + k2 Re(t) > 0 for every numerator Gamma.
struct Constraint {
  double k0, k1, k2;
};

std::vector<Constraint> numerator_constraints(const BivFoxHParams& p) {
  std::vector<Constraint> out;
  for (std::size_t j = 0; j < p.n1; ++j) {
    const auto& q = p.joint_upper[j];
    out.push_back({1.0 - q.shift, -q.scale_x, -q.scale_y});
  }
  for (std::size_t j = 0; j < p.first.m; ++j)
    out.push_back({p.first.lower[j].shift, p.first.lower[j].scale, 0.0});
  for (std::size_t j = 0; j < p.first.n; ++j)
    out.push_back({1.0 - p.first.upper[j].shift, -p.first.upper[j].scale, 0.0});
  for (std::size_t j = 0; j < p.second.m; ++j)
    out.push_back({p.second.lower[j].shift, 0.0, p.second.lower[j].scale});
  for (std::size_t j = 0; j < p.second.n; ++j)
    out.push_back({1.0 - p.second.upper[j].shift, 0.0, -p.second.upper[j].scale});
  return out;
}

struct PoleDistance {
  double d1 = kInf;  // along Re(s)
  double d2 = kInf;  // along Re(t)
  double both() const { return std::min(d1, d2); }
};

PoleDistance pole_distance(const std::vector<Constraint>& cs, double c1, double c2) {
  PoleDistance d;
  for (const auto& c : cs) {
    const double g = c.k0 + c.k1 * c1 + c.k2 * c2;
    if (c.k1 != 0.0) d.d1 = std::min(d.d1, g / std::abs(c.k1));
    if (c.k2 != 0.0) d.d2 = std::min(d.d2, g / std::abs(c.k2));
  }
  return d;
}

class Integrand2 {
 public:
  Integrand2(const BivFoxHParams& p, double x, double y)
      : p_(p), log_x_(std::log(x)), log_y_(std::log(y)) {}

  cplx log_first(cplx s) const { return detail::log_theta(p_.first, s) - s * log_x_; }
  cplx log_second(cplx t) const { return detail::log_theta(p_.second, t) - t * log_y_; }
  cplx log_joint(cplx s, cplx t) const {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < p_.joint_upper.size(); ++j) {
      const auto& q = p_.joint_upper[j];
      if (j < p_.n1)
        acc += log_gamma(1.0 - q.shift - q.scale_x * s - q.scale_y * t);
      else
        acc -= log_gamma(q.shift + q.scale_x * s + q.scale_y * t);
    }
    for (const auto& q : p_.joint_lower)
      acc -= log_gamma(1.0 - q.shift - q.scale_x * s - q.scale_y * t);
    return acc;
  }
  double log_abs(cplx s, cplx t) const {
    return (log_first(s) + log_second(t) + log_joint(s, t)).real();
  }

  const BivFoxHParams& params() const { return p_; }

 private:
  const BivFoxHParams& p_;
  double log_x_, log_y_;
};

double objective2(const Integrand2& f, double c1, double c2) {
  double v = -kInf;
  for (auto [a, b] : {std::pair{0.0, 0.0}, std::pair{0.3, 0.0}, std::pair{0.0, 0.3}}) {
    const double l = f.log_abs(cplx(c1, a), cplx(c2, b));
    if (std::isfinite(l)) v = std::max(v, l);
  }
  return std::isfinite(v) ? v : kInf;
}

std::pair<double, double> axis_range(double lo, double hi) {
  if (std::isfinite(lo) && std::isfinite(hi)) return {lo, hi};
  if (std::isfinite(lo)) return {lo, lo + 30.0};
  if (std::isfinite(hi)) return {hi - 30.0, hi};
  return {-15.0, 15.0};
}

// Picks (c1, c2): among points at least 10% of the Chebyshev-like radius away
// from every pole hyperplane, and whose integrand magnitude is within four
// decades of the smallest one found, take the point farthest from the poles.
std::pair<double, double> place_contour2(const Integrand2& f,
                                         const std::vector<Constraint>& cs) {
  double l1 = -kInf, r1 = kInf, l2 = -kInf, r2 = kInf;
  for (const auto& c : cs) {
    if (c.k2 == 0.0 && c.k1 > 0.0) l1 = std::max(l1, -c.k0 / c.k1);
    if (c.k2 == 0.0 && c.k1 < 0.0) r1 = std::min(r1, -c.k0 / c.k1);
    if (c.k1 == 0.0 && c.k2 > 0.0) l2 = std::max(l2, -c.k0 / c.k2);
    if (c.k1 == 0.0 && c.k2 < 0.0) r2 = std::min(r2, -c.k0 / c.k2);
  }
  // Tighten with the joint constraints (two sweeps suffice for a box).
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (const auto& c : cs) {
      if (c.k1 == 0.0 || c.k2 == 0.0) continue;
      if (c.k1 < 0.0 && c.k2 < 0.0) {
        if (std::isfinite(l2)) r1 = std::min(r1, (c.k0 + c.k2 * l2) / -c.k1);
        if (std::isfinite(l1)) r2 = std::min(r2, (c.k0 + c.k1 * l1) / -c.k2);
      } else if (c.k1 > 0.0 && c.k2 > 0.0) {
        if (std::isfinite(r2)) l1 = std::max(l1, -(c.k0 + c.k2 * r2) / c.k1);
        if (std::isfinite(r1)) l2 = std::max(l2, -(c.k0 + c.k1 * r1) / c.k2);
      }
    }
  }
  auto [a1, b1] = axis_range(l1, r1);
  auto [a2, b2] = axis_range(l2, r2);

  constexpr int kGrid = 41;
  struct Cand {
    double c1, c2, dist, obj;
  };
  std::vector<Cand> all;
  double dmax = 0.0;
  double best_c1 = 0.5 * (a1 + b1), best_c2 = 0.5 * (a2 + b2);
  for (int pass = 0; pass < 3; ++pass) {
    const double g1 = (b1 - a1) / (kGrid - 1), g2 = (b2 - a2) / (kGrid - 1);
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) {
        const double c1 = a1 + i * g1, c2 = a2 + j * g2;
        const double d = pole_distance(cs, c1, c2).both();
        if (!(d > 0.0)) continue;
        dmax = std::max(dmax, d);
        all.push_back({c1, c2, d, objective2(f, c1, c2)});
      }
    }
    if (all.empty())
      throw ContourSeparationError("bivariate_fox_h: no contour separates the pole families");
    double omin = kInf;
    for (const auto& c : all)
      if (c.dist >= 0.1 * dmax) omin = std::min(omin, c.obj);
    double best_d = -1.0;
    for (const auto& c : all) {
      if (c.dist < 0.1 * dmax || c.obj > omin + std::log(1e4)) continue;
      if (c.dist > best_d) {
        best_d = c.dist;
        best_c1 = c.c1;
        best_c2 = c.c2;
      }
    }
    const double w1 = 2.0 * g1, w2 = 2.0 * g2;
    a1 = best_c1 - w1;
    b1 = best_c1 + w1;
    a2 = best_c2 - w2;
    b2 = best_c2 + w2;
  }
  return {best_c1, best_c2};
}

struct Level {
  double value = 0.0;
  double peak = 0.0;
  double tail = 0.0;
  double imag_row0 = 0.0;
  double sigma_extent = 0.0;
  double tau_extent = 0.0;
  std::size_t evaluations = 0;
};

// Lazily filled cache of log Theta_1 on the sigma grid.
class RowCache {
 public:
  RowCache(const Integrand2& f, double c1, double h1) : f_(f), c1_(c1), h1_(h1) {}
  cplx at(long j) {
    auto& v = j >= 0 ? pos_ : neg_;
    const std::size_t idx = j >= 0 ? static_cast<std::size_t>(j) : static_cast<std::size_t>(-j);
    if (idx >= v.size()) {
      v.resize(idx + 1);
      flags(j).resize(idx + 1, false);
    }
    if (!flags(j)[idx]) {
      v[idx] = f_.log_first(cplx(c1_, j * h1_));
      flags(j)[idx] = true;
    }
    return v[idx];
  }

 private:
  std::vector<bool>& flags(long j) { return j >= 0 ? pos_ok_ : neg_ok_; }
  const Integrand2& f_;
  double c1_, h1_;
  std::vector<cplx> pos_, neg_;
  std::vector<bool> pos_ok_, neg_ok_;
};

Level run_level(const Integrand2& f, double c1, double c2, double h1, double h2,
                double ridge_slope) {
  Level out;
  RowCache first(f, c1, h1);
  double sum = 0.0;
  double peak = 0.0;
  double window_max = 0.0, prev_window_max = kInf;
  double window_end = 1.0;
  double kappa_tail = 0.0;

  for (long k = 0;; ++k) {
    const double tau = k * h2;
    const cplx t(c2, tau);
    const cplx l2 = f.log_second(t);
    const double weight = (k == 0) ? 1.0 : 2.0;
    double row = 0.0, row_imag = 0.0, row_max = 0.0;
    if (!(std::isinf(l2.real()) && l2.real() < 0.0)) {
      auto eval = [&](long j) {
        const cplx s(c1, j * h1);
        const cplx v = detail::safe_exp(first.at(j) + l2 + f.log_joint(s, t));
        ++out.evaluations;
        row += v.real();
        row_imag += v.imag();
        const double a = std::abs(v);
        row_max = std::max(row_max, a);
        peak = std::max(peak, a);
        return a;
      };
      const double w = ridge_slope * tau + 2.0;
      const long jw = static_cast<long>(std::ceil(w / h1));
      for (long j = -jw; j <= jw; ++j) eval(j);
      // Extend outward on each side until the envelope has decayed.
      for (int side : {1, -1}) {
        double wmax = 0.0, pwmax = kInf;
        double wend = jw * h1 + 1.0;
        for (long j = jw + 1;; ++j) {
          const double sigma = j * h1;
          wmax = std::max(wmax, eval(side * j));
          if (sigma >= wend) {
            if (wmax < pwmax && wmax <= 1e-17 * peak) break;
            pwmax = wmax;
            wmax = 0.0;
            wend += 1.0;
          }
          if (sigma > 4000.0)
            throw NonConvergenceError("bivariate_fox_h: integrand does not decay in Im(s)");
        }
        out.sigma_extent = std::max(out.sigma_extent, (jw + 1) * h1);
      }
    }
    sum += weight * row;
    if (k == 0) out.imag_row0 = row_imag;
    window_max = std::max(window_max, row_max);
    if (out.evaluations > kMaxEvaluations)
      throw NonConvergenceError("bivariate_fox_h: evaluation budget exhausted");
    if (tau >= window_end) {
      if (window_max < prev_window_max && window_max <= 1e-17 * peak && tau >= 2.0) {
        kappa_tail = std::log(prev_window_max / std::max(window_max, 1e-300));
        out.tau_extent = tau;
        break;
      }
      prev_window_max = window_max;
      window_max = 0.0;
      window_end += 1.0;
    }
    if (tau > 4000.0)
      throw NonConvergenceError("bivariate_fox_h: integrand does not decay in Im(t)");
  }
  out.value = sum * h1 * h2 / (4.0 * kPi * kPi);
  out.peak = peak;
  // Rough bound for what lies beyond the last row.
  out.tail = 1e-17 * peak * 2.0 * out.sigma_extent / (std::max(kappa_tail, 1.0) * 4.0 * kPi * kPi);
  return out;
}

BivHValue contour2d(const BivFoxHParams& p, double x, double y) {
  const auto cs = numerator_constraints(p);
  const Integrand2 f(p, x, y);
  const auto [c1, c2] = place_contour2(f, cs);
  const PoleDistance pd = pole_distance(cs, c1, c2);

  double ridge = 0.0;
  for (const auto& q : p.joint_upper)
    if (q.scale_x > 0.0) ridge = std::max(ridge, q.scale_y / q.scale_x);
  for (const auto& q : p.joint_lower)
    if (q.scale_x > 0.0) ridge = std::max(ridge, q.scale_y / q.scale_x);

  double h1 = std::min(pd.d1 / 2.5, 0.5);
  double h2 = std::min(pd.d2 / 2.5, 0.5);
  Level prev = run_level(f, c1, c2, h1, h2, ridge);
  std::size_t evals = prev.evaluations;
  double rel_change = kInf;
  Level cur;
  for (int level = 0; level < 3; ++level) {
    h1 /= 2.0;
    h2 /= 2.0;
    cur = run_level(f, c1, c2, h1, h2, ridge);
    evals += cur.evaluations;
    rel_change = std::abs(cur.value - prev.value) / std::max(std::abs(cur.value), 1e-300);
    if (rel_change <= kAcceptTol) break;
    prev = cur;
  }

  BivHValue out;
  out.method = BivMethod::contour2d;
  out.value = cur.value;
  out.first.abscissa = c1;
  out.first.step = h1;
  out.first.half_length = cur.sigma_extent;
  out.first.evaluations = evals;
  out.second.abscissa = c2;
  out.second.step = h2;
  out.second.half_length = cur.tau_extent;
  out.second.evaluations = evals;
  const double scale = std::max(std::abs(cur.value), 1e-300);
  out.first.imag_residual = std::abs(cur.imag_row0 * h1 * h2 / (4.0 * kPi * kPi));
  out.estimated_rel_error = rel_change + cur.tail / scale;
  out.first.estimated_rel_error = out.second.estimated_rel_error = out.estimated_rel_error;
  if (!(out.estimated_rel_error <= kAcceptTol))
    throw NonConvergenceError("bivariate_fox_h: double contour error estimate " +
                              std::to_string(out.estimated_rel_error));
  if (out.first.imag_residual > 1e-8 * (1.0 + std::abs(out.value)))
    throw NonConvergenceError("bivariate_fox_h: imaginary residual too large");
  return out;
}

}  // namespace

void BivFoxHParams::validate() const {
  first.validate();
  second.validate();
  if (n1 > joint_upper.size())
    throw DomainError("BivFoxHParams: n1 exceeds the number of joint upper terms");
  const bool reducible = is_reducible(*this);
  auto check = [&](const std::vector<JointTerm>& v) {
    for (const auto& t : v) {
      if (!std::isfinite(t.shift) || !(t.scale_x > 0.0) || !std::isfinite(t.scale_x) ||
          !std::isfinite(t.scale_y) || t.scale_y < 0.0 || (!reducible && t.scale_y == 0.0))
        throw DomainError("BivFoxHParams: joint scales must be positive and finite");
    }
  };
  check(joint_upper);
  check(joint_lower);
}

double bivariate_min_decay(const BivFoxHParams& p) {
  const double a1 = detail::decay_rate(p.first);
  const double a2 = detail::decay_rate(p.second);
  double worst = kInf;
  constexpr int kDirections = 3600;
  for (int i = 0; i < kDirections; ++i) {
    const double th = 2.0 * kPi * i / kDirections;
    const double u = std::cos(th), v = std::sin(th);
    double d = a1 * std::abs(u) + a2 * std::abs(v);
    for (std::size_t j = 0; j < p.joint_upper.size(); ++j) {
      const auto& q = p.joint_upper[j];
      d += (j < p.n1 ? 1.0 : -1.0) * std::abs(q.scale_x * u + q.scale_y * v);
    }
    for (const auto& q : p.joint_lower) d -= std::abs(q.scale_x * u + q.scale_y * v);
    worst = std::min(worst, d);
  }
  return worst;
}

BivHValue bivariate_fox_h_eval(const BivFoxHParams& params, double x, double y,
                               BivMethod method) {
  params.validate();
  if (!(x > 0.0) || !std::isfinite(x) || !(y > 0.0) || !std::isfinite(y))
    throw DomainError("bivariate_fox_h: arguments must be positive and finite");

  if (is_reducible(params)) {
    const HValue h = reduce_to_single(params, x);
    BivHValue out;
    out.method = BivMethod::reduced;
    out.value = h.value;
    out.first = h.diagnostics;
    out.estimated_rel_error = h.diagnostics.estimated_rel_error;
    return out;
  }

  const bool absolutely_convergent = bivariate_min_decay(params) > 1e-3;
  if (method == BivMethod::automatic || method == BivMethod::reduced)
    method = absolutely_convergent ? BivMethod::contour2d : BivMethod::residue_series;
  if (method == BivMethod::contour2d) {
    if (!absolutely_convergent)
      throw NonConvergenceError(
          "bivariate_fox_h: double contour integral is not absolutely convergent");
    return contour2d(params, x, y);
  }
  if (params.second.m == 0)
    throw NonConvergenceError("bivariate_fox_h: no left poles for the residue series");
  return residue_series(params, x, y);
}

}  // namespace wrelay::specfun
