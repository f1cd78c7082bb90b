#include "orchard_duo/errors.hpp"

namespace orchard_duo {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ControlOutOfRange: return "ControlOutOfRange";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::SingularTransition: return "SingularTransition";
    case ErrorCode::EigenNonConvergence: return "EigenNonConvergence";
    case ErrorCode::InconsistentClosedForm: return "InconsistentClosedForm";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::StrategyMismatch: return "StrategyMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace orchard_duo
