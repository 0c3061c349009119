#ifndef WRELAY_SPECFUN_ERRORS_HPP
#define WRELAY_SPECFUN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wrelay {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Argument sits on a pole (e.g. Gamma at a non-positive integer).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The two pole families of a Mellin-Barnes integrand cannot be separated
// by a vertical line.
class ContourSeparationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed to reach its accuracy target.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wrelay

#endif  // WRELAY_SPECFUN_ERRORS_HPP
