#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mincop {

enum class ErrorKind {
    InvalidAxes,
    ShapeError,
    InvalidArray,
    InvalidParameter,
    NumericalError,
    DomainError,
    DegenerateMoment,
    InfeasibleScaling,
    InvalidGISFamily,
    TargetOutOfRange,
    InvalidProblem,
    OracleBudgetExceeded,
    IoError,
    ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    /// The description without the kind prefix.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace mincop
