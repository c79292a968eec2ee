#ifndef BELIEFVAR_ERRORS_HPP
#define BELIEFVAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace beliefvar {

/// Base class for all beliefvar exceptions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Network construction / validation
struct CycleDetected : Error { using Error::Error; };
struct MissingRow : Error { using Error::Error; };
struct NonPositiveAlpha : Error { using Error::Error; };
struct IndexMismatch : Error { using Error::Error; };

// BDe prior construction
struct NonPositiveM : Error { using Error::Error; };
struct RowNotNormalized : Error { using Error::Error; };
struct ZeroParentProbability : Error { using Error::Error; };

// Inference
struct ScopeMismatch : Error { using Error::Error; };
struct ZeroEvidenceProbability : Error { using Error::Error; };

// Variance machinery
struct NumericalInstability : Error { using Error::Error; };
struct DegenerateQuery : Error { using Error::Error; };

// Continuous families
struct SingularPsi : Error { using Error::Error; };

// Harness
struct UnknownBenchmark : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };

}  // namespace beliefvar

#endif  // BELIEFVAR_ERRORS_HPP
