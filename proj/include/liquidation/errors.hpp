#pragma once

#include <stdexcept>
#include <string>

namespace liquidation {

/// Base of every error raised by the library. Callers that only need to
/// distinguish "bad input" from "numerical failure" can catch the two
/// intermediate classes below.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when inputs violate a model invariant.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Raised when a solver or integrator cannot produce a trustworthy value.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

#define LIQUIDATION_DEFINE_ERROR(Name, Base)                                \
    class Name : public Base {                                              \
    public:                                                                 \
        explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
    }

LIQUIDATION_DEFINE_ERROR(WeightsNotSimplex, InvalidInput);
LIQUIDATION_DEFINE_ERROR(NonpositiveImpact, InvalidInput);
LIQUIDATION_DEFINE_ERROR(LengthMismatch, InvalidInput);
LIQUIDATION_DEFINE_ERROR(InfeasiblePenalty, InvalidInput);
LIQUIDATION_DEFINE_ERROR(ProbabilityOverflow, InvalidInput);
LIQUIDATION_DEFINE_ERROR(DegenerateSample, InvalidInput);

LIQUIDATION_DEFINE_ERROR(TanSingularity, NumericalFailure);
LIQUIDATION_DEFINE_ERROR(StepTooLarge, NumericalFailure);
LIQUIDATION_DEFINE_ERROR(QuadratureNotConverged, NumericalFailure);
LIQUIDATION_DEFINE_ERROR(UnstableScheme, NumericalFailure);
LIQUIDATION_DEFINE_ERROR(InventoryUnderflow, NumericalFailure);

#undef LIQUIDATION_DEFINE_ERROR

}  // namespace liquidation
