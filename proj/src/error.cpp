#include "mincop/error.hpp"

namespace mincop {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidAxes: return "InvalidAxes";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::InvalidArray: return "InvalidArray";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegenerateMoment: return "DegenerateMoment";
    case ErrorKind::InfeasibleScaling: return "InfeasibleScaling";
    case ErrorKind::InvalidGISFamily: return "InvalidGISFamily";
    case ErrorKind::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorKind::InvalidProblem: return "InvalidProblem";
    case ErrorKind::OracleBudgetExceeded: return "OracleBudgetExceeded";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Error";
}

}  // namespace mincop
