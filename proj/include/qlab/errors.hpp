#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

#define QLAB_DEFINE_ERROR(Name)                                      \
  struct Name : std::runtime_error {                                 \
    explicit Name(const std::string& msg) : std::runtime_error(msg) {} \
  }

QLAB_DEFINE_ERROR(ConjugateConflict);
QLAB_DEFINE_ERROR(OutOfBand);
QLAB_DEFINE_ERROR(NotReal);
QLAB_DEFINE_ERROR(ParseError);
QLAB_DEFINE_ERROR(DegreeTooLow);
QLAB_DEFINE_ERROR(EmptyNonlinearity);
QLAB_DEFINE_ERROR(JetOverflow);
QLAB_DEFINE_ERROR(NotZeroSum);
QLAB_DEFINE_ERROR(ArityMismatch);
QLAB_DEFINE_ERROR(SlotIndexError);
QLAB_DEFINE_ERROR(BudgetExceeded);
QLAB_DEFINE_ERROR(CalibrationFailed);
QLAB_DEFINE_ERROR(InternalResonanceHit);
QLAB_DEFINE_ERROR(NoContraction);
QLAB_DEFINE_ERROR(MaxIterExceeded);
QLAB_DEFINE_ERROR(BackwardHeat);
QLAB_DEFINE_ERROR(NonFinite);
QLAB_DEFINE_ERROR(DegenerateTrajectory);
QLAB_DEFINE_ERROR(ConfigError);
QLAB_DEFINE_ERROR(UnknownPreset);
QLAB_DEFINE_ERROR(OverflowError);

#undef QLAB_DEFINE_ERROR

}  // namespace qlab
