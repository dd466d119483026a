#pragma once

#include <stdexcept>
#include <string>

namespace chiral {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Intermediate result exceeded the double range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Parameters are valid numbers but outside the regime a model or engine
/// is allowed to operate in (e.g. s_n <= e, gamma engine with v > 64).
class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested evaluation is too expensive for the selected engine.
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A certified bound could not be reached.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root or quantile bracketing failed.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample batches of the wrong size or on incompatible scales.
class SampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace chiral
