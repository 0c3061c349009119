#ifndef WRELAY_SPECFUN_IDENTITIES_HPP
#define WRELAY_SPECFUN_IDENTITIES_HPP

#include <string>
#include <vector>

namespace wrelay::specfun {

struct IdentityCheck {
  std::string name;
  int points = 0;
  double max_rel_error = 0.0;
  double worst_z = 0.0;
  bool passed = false;
};

// Elementary functions written as Fox H and Meijer G functions, compared
// with their direct evaluation on log-spaced grids.
std::vector<IdentityCheck> run_identity_suite(int points = 200, double tolerance = 1e-8);

}  // namespace wrelay::specfun

#endif  // WRELAY_SPECFUN_IDENTITIES_HPP
