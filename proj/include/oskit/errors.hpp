#pragma once

#include <stdexcept>
#include <string>

namespace oskit {

// Base class for all toolkit errors. Malformed inputs, violated
// preconditions and solver breakdowns throw; inconclusive verdicts do not
// (they are carried in result types as Unknown / Marginal).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define OSKIT_DEFINE_ERROR(NAME)                                             \
  class NAME : public Error {                                                \
  public:                                                                    \
    explicit NAME(const std::string& what) : Error(#NAME ": " + what) {}     \
  }

OSKIT_DEFINE_ERROR(InvalidInput);
OSKIT_DEFINE_ERROR(ShapeMismatch);
OSKIT_DEFINE_ERROR(SizeCapExceeded);
OSKIT_DEFINE_ERROR(NumericalBreakdown);
OSKIT_DEFINE_ERROR(DependentBasis);
OSKIT_DEFINE_ERROR(UnitNotInSpan);
OSKIT_DEFINE_ERROR(EmptyFamily);
OSKIT_DEFINE_ERROR(SpanDeficit);
OSKIT_DEFINE_ERROR(NotContraction);
OSKIT_DEFINE_ERROR(MissingBlocks);
OSKIT_DEFINE_ERROR(UnsupportedProfile);
OSKIT_DEFINE_ERROR(ZeroSecondBlock);
OSKIT_DEFINE_ERROR(SingularConditioning);
OSKIT_DEFINE_ERROR(NotPSD);
OSKIT_DEFINE_ERROR(VersionMismatch);
OSKIT_DEFINE_ERROR(SchemaError);
OSKIT_DEFINE_ERROR(InsufficientMargin);

#undef OSKIT_DEFINE_ERROR

}  // namespace oskit
