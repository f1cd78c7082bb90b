#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orchard_duo {

enum class ErrorCode {
    ControlOutOfRange,
    NonFiniteState,
    NonConvergence,
    DivisionByZero,
    SingularTransition,
    EigenNonConvergence,
    InconsistentClosedForm,
    InvalidRange,
    DegenerateColumn,
    StrategyMismatch,
    ConfigInvalid,
    ParseError,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code. `field`
/// names the offending input (e.g. "controls.m1") when one can be identified.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string field = {})
        : std::runtime_error(message), code_(code), field_(std::move(field))
    {
    }

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

} // namespace orchard_duo
