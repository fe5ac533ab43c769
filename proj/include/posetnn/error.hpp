#pragma once

#include <stdexcept>
#include <string>

namespace posetnn {

// Base of every domain error thrown by the library. The CLI maps these to
// exit code 1; usage errors (bad flags) exit with 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define POSETNN_DEFINE_ERROR(Name)                 \
    class Name : public Error {                    \
    public:                                        \
        using Error::Error;                        \
    };

POSETNN_DEFINE_ERROR(ParseError)
POSETNN_DEFINE_ERROR(CycleError)
POSETNN_DEFINE_ERROR(IndexError)
POSETNN_DEFINE_ERROR(ArityError)
POSETNN_DEFINE_ERROR(SizeError)
POSETNN_DEFINE_ERROR(DimensionError)
POSETNN_DEFINE_ERROR(NotOrderPolytopeError)
POSETNN_DEFINE_ERROR(NegativeExponentError)
POSETNN_DEFINE_ERROR(NotPosetPolynomialError)
POSETNN_DEFINE_ERROR(SourceMissingError)
POSETNN_DEFINE_ERROR(ShapeError)
POSETNN_DEFINE_ERROR(FormatError)
POSETNN_DEFINE_ERROR(IOError)
POSETNN_DEFINE_ERROR(OverflowError)

#undef POSETNN_DEFINE_ERROR

} // namespace posetnn
