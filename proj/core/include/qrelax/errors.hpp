#pragma once

#include <stdexcept>
#include <string>

namespace qrelax {

// Base class for all recoverable numerical/domain failures raised by the
// library.  Contract violations (bad shell index, malformed grid, ...) use
// std::invalid_argument instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Guidance equation evaluated too close to a wave-function node.
struct NodeProximityError : Error {
  using Error::Error;
};

// Adaptive step size fell below the configured minimum.
struct StepUnderflowError : Error {
  using Error::Error;
};

// Phase-unwrapping winding computation could not be certified.
struct AmbiguousWindingError : Error {
  using Error::Error;
};

// Quantity requested for a degenerate / fine-tuned configuration.
struct FineTunedError : Error {
  using Error::Error;
};

// Node-track association could not be resolved by frame refinement.
struct TrackingAmbiguityError : Error {
  using Error::Error;
};

// Top-shell polynomial has a zero too close to the unit circle for the
// interior zero count to be certified.
struct ZeroNearCircleError : Error {
  using Error::Error;
};

// Top shell of the state carries no amplitude; the vorticity theorem does
// not apply.
struct EmptyShellError : Error {
  using Error::Error;
};

// Rejection sampling gave up before hitting the requested target.
struct AttemptsExhaustedError : Error {
  using Error::Error;
};

// State file violates the schema.
struct SchemaError : Error {
  using Error::Error;
};

// State file coefficients are not normalized.
struct NormalizationError : Error {
  using Error::Error;
};

}  // namespace qrelax
