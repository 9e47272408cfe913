#pragma once

#include <stdexcept>
#include <string>

namespace gpb {

// Shared error vocabulary. Every throw site supplies a message naming the
// offending quantity; callers may catch the specific type or std::exception.

// Input sizes or shapes are inconsistent (vector lengths, matrix dims, ...).
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A parameter value is outside its documented range.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Matrix could not be factorized even after the full jitter schedule.
struct NotFactorizable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computed quantity left its mathematically valid range by more than
// tolerated floating-point slack (e.g. a strongly negative variance).
struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A prediction was requested before observations covered all queried points.
struct ObservationsMissing : std::logic_error {
  using std::logic_error::logic_error;
};

// Exhaustive computation was requested beyond its guarded instance size.
struct InstanceTooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Gram matrix of sampled centers is numerically singular.
struct DegenerateGram : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chosen action index is not part of the offered action set.
struct ActionNotInSet : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An action set (domain, context subset, survivor set) is empty.
struct EmptyActionSet : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A base learner was addressed after its elimination.
struct InactiveBase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Experiment configuration failed validation; message names the field.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace gpb
