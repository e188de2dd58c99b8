#pragma once

#include <stdexcept>

namespace sta {

struct StaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// poly_bvp
struct SingularSystem : StaError { using StaError::StaError; };
struct OrderMismatch : StaError { using StaError::StaError; };
struct OutOfDomain : StaError { using StaError::StaError; };

// protocol
struct NonPositiveRho : StaError { using StaError::StaError; };
struct ZeroFrequency : StaError { using StaError::StaError; };

// timing
struct InvalidBracket : StaError { using StaError::StaError; };
struct NonMonotone : StaError { using StaError::StaError; };

// qsim
struct NotConverged : StaError { using StaError::StaError; };
struct InsufficientGrid : StaError { using StaError::StaError; };
struct CFLViolation : StaError { using StaError::StaError; };
struct NormDrift : StaError { using StaError::StaError; };
struct FrameMismatch : StaError { using StaError::StaError; };
struct QuadratureFailure : StaError { using StaError::StaError; };

// doublewell
struct NotDoubleWell : StaError { using StaError::StaError; };

// cli / scenario files
struct ScenarioError : StaError { using StaError::StaError; };

}  // namespace sta
