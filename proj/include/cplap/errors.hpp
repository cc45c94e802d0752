#ifndef CPLAP_ERRORS_HPP
#define CPLAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cplap {

/// Shape or index mismatch between matrix-field operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coefficient field failed the ellipticity/admissibility gate.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An evaluator produced a non-finite value; message carries the location.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration rejected before any computation ran.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sub-square or radius cannot be resolved on the current mesh.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sensitivity condition s* excludes the requested operation.
class ConditionViolatedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cplap

#endif
