#include "wrelay/specfun/identities.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "wrelay/specfun/fox_h.hpp"
#include "wrelay/specfun/special.hpp"

namespace wrelay::specfun {

namespace {

IdentityCheck check(const std::string& name, double lo, double hi, int points, double tol,
                    const std::function<double(double)>& lhs,
                    const std::function<double(double)>& rhs) {
  IdentityCheck c;
  c.name = name;
  c.points = points;
  for (int i = 0; i < points; ++i) {
    const double z = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    const double want = rhs(z);
    const double err = std::abs(lhs(z) - want) / std::abs(want);
    if (!(err <= c.max_rel_error)) {  // also catches NaN
      c.max_rel_error = std::isnan(err) ? INFINITY : err;
      c.worst_z = z;
    }
  }
  c.passed = c.max_rel_error <= tol;
  return c;
}

}  // namespace

std::vector<IdentityCheck> run_identity_suite(int points, double tol) {
  const FoxHParams exp_h{1, 0, {}, {{0.0, 1.0}}};
  const FoxHParams erfc_h{2, 0, {{1.0, 1.0}}, {{0.0, 1.0}, {0.5, 1.0}}};
  const FoxHParams log_h{1, 2, {{1.0, 1.0}, {1.0, 1.0}}, {{1.0, 1.0}, {0.0, 1.0}}};
  // 2 exp(-z^2) = H^{1,0}_{0,1}[z | -; (0, 1/2)] exercises a non-unit weight.
  const FoxHParams gauss_h{1, 0, {}, {{0.0, 0.5}}};
  const double sqrt_pi = std::sqrt(std::numbers::pi);

  std::vector<IdentityCheck> out;
  out.push_back(check("exp(-z) = H^{1,0}_{0,1}", 1e-3, 30.0, points, tol,
                      [&](double z) { return fox_h(exp_h, z); },
                      [](double z) { return std::exp(-z); }));
  out.push_back(check("exp(-z^2) = H^{1,0}_{0,1} with weight 1/2", 1e-2, 5.0, points, tol,
                      [&](double z) { return fox_h(gauss_h, z) / 2.0; },
                      [](double z) { return std::exp(-z * z); }));
  out.push_back(check("erfc(sqrt z) = H^{2,0}_{1,2} / sqrt(pi)", 1e-4, 25.0, points, tol,
                      [&](double z) { return fox_h(erfc_h, z) / sqrt_pi; },
                      [](double z) { return std::erfc(std::sqrt(z)); }));
  out.push_back(check("log(1+z) = H^{1,2}_{2,2}", 1e-4, 1e4, points, tol,
                      [&](double z) { return fox_h(log_h, z); },
                      [](double z) { return std::log1p(z); }));
  out.push_back(check("1/(1+z) = G^{1,1}_{1,1}", 1e-4, 1e4, points, tol,
                      [](double z) { return meijer_g(1, 1, {0.0}, {0.0}, z); },
                      [](double z) { return 1.0 / (1.0 + z); }));
  return out;
}

}  // namespace wrelay::specfun
