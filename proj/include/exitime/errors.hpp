#pragma once

#include <stdexcept>
#include <string>

namespace exitime {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define EXITIME_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

EXITIME_DEFINE_ERROR(Escaped);
EXITIME_DEFINE_ERROR(NoRealFixedPoints);
EXITIME_DEFINE_ERROR(InvalidSpectrum);
EXITIME_DEFINE_ERROR(InvalidArgument);
EXITIME_DEFINE_ERROR(InvalidPolygon);
EXITIME_DEFINE_ERROR(NotInRegion);
EXITIME_DEFINE_ERROR(EmptyEntrySet);
EXITIME_DEFINE_ERROR(InvalidIndex);
EXITIME_DEFINE_ERROR(InsufficientData);
EXITIME_DEFINE_ERROR(UnreliableEstimate);
EXITIME_DEFINE_ERROR(BudgetExceeded);
EXITIME_DEFINE_ERROR(NoHomoclinicFound);
EXITIME_DEFINE_ERROR(ActionNotConverged);
EXITIME_DEFINE_ERROR(OutsideLobe);
EXITIME_DEFINE_ERROR(UnsupportedGeometry);

#undef EXITIME_DEFINE_ERROR

} // namespace exitime
