#pragma once

#include <stdexcept>
#include <string>

namespace mvcca {

/// Error taxonomy shared by the whole toolkit. Every failure mode maps to one
/// of these codes; the C API and the CLI exit codes are derived from them.
enum class ErrorCode {
    parse,      // malformed file content
    dimension,  // shape mismatch between operands
    data,       // non-finite or otherwise invalid values
    io,         // filesystem failure
    degenerate, // input too small / single class / lambda < 2
    singular,   // exactly singular covariance block with ridge disabled
    range,      // scalar argument outside its documented range
    label,      // label outside 0..C-1
    empty,      // empty aggregate where content is required
    unfitted,   // plan/transform used before fitting
    config,     // invalid configuration
};

const char* error_code_name(ErrorCode code);

/// CLI/exit-code mapping: 2 config error, 3 data error, 4 numeric failure.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define MVCCA_DEFINE_ERROR(NAME, CODE)                    \
    class NAME : public Error {                           \
    public:                                               \
        explicit NAME(const std::string& message)         \
            : Error(ErrorCode::CODE, message) {}          \
    }

MVCCA_DEFINE_ERROR(ParseError, parse);
MVCCA_DEFINE_ERROR(DimensionError, dimension);
MVCCA_DEFINE_ERROR(DataError, data);
MVCCA_DEFINE_ERROR(IoError, io);
MVCCA_DEFINE_ERROR(DegenerateError, degenerate);
MVCCA_DEFINE_ERROR(SingularError, singular);
MVCCA_DEFINE_ERROR(RangeError, range);
MVCCA_DEFINE_ERROR(LabelError, label);
MVCCA_DEFINE_ERROR(EmptyError, empty);
MVCCA_DEFINE_ERROR(UnfittedError, unfitted);
MVCCA_DEFINE_ERROR(ConfigError, config);

#undef MVCCA_DEFINE_ERROR

} // namespace mvcca
