#pragma once

#include <stdexcept>
#include <string>

namespace homsim {

// Invalid user input: bad parameter ranges, malformed literals.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: quadrature non-convergence, coarse grids, singular limits.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A formula evaluated outside the range where it yields a probability.
class InvalidRegime : public NumericError {
 public:
  using NumericError::NumericError;
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}
}  // namespace detail

}  // namespace homsim
