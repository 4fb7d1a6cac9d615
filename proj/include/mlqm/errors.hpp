#ifndef MLQM_ERRORS_HPP
#define MLQM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mlqm {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parameter or configuration values that violate a documented invariant.
class invalid_argument : public error {
public:
  using error::error;
};

class invalid_grid : public invalid_argument {
public:
  using invalid_argument::invalid_argument;
};

/// Evaluation requested outside the mathematical domain of a function.
class domain_error : public error {
public:
  using error::error;
};

/// f(p) <= 0 somewhere, so q = int dp / sqrt(f) is not defined.
class ellipticity_error : public error {
public:
  using error::error;
};

/// Integral or state that does not converge (non-normalizable, node-doubling failure).
class divergence_error : public error {
public:
  using error::error;
};

/// Model whose parameters admit no real spectrum or are degenerate.
class model_error : public error {
public:
  using error::error;
};

/// Failure inside a numerical kernel (LAPACK info != 0, resolution too low).
class numeric_error : public error {
public:
  using error::error;
};

} // namespace mlqm

#endif
