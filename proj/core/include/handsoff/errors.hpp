#pragma once

#include <stdexcept>
#include <string>

namespace handsoff {

/// Operand shapes do not agree (e.g. a.cols != b.rows).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pivot fell below the singularity threshold during elimination.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The matrix has spectrum on (or numerically at) the imaginary axis.
class NonHyperbolicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No admissible control steers the initial state to the target.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The transcribed constraint rows are too badly scaled to trust.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Envelope fitting was given nothing usable.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace handsoff
