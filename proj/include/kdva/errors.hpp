#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kdva {

enum class ErrorKind {
    ParseError,
    ValidationError,
    DecayViolation,
    BoxTooSmall,
    SolvabilityBroken,
    DerivationMismatch,
    NonFiniteState,
    OutOfBox,
    InsufficientSnapshots,
    GridMismatch,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::DecayViolation: return "DecayViolation";
        case ErrorKind::BoxTooSmall: return "BoxTooSmall";
        case ErrorKind::SolvabilityBroken: return "SolvabilityBroken";
        case ErrorKind::DerivationMismatch: return "DerivationMismatch";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::OutOfBox: return "OutOfBox";
        case ErrorKind::InsufficientSnapshots: return "InsufficientSnapshots";
        case ErrorKind::GridMismatch: return "GridMismatch";
    }
    return "Unknown";
}

/// Single exception type for the library. `field()` is set for validation
/// failures and holds a dotted config path such as "params.a".
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string field = {})
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, std::string field = {}) {
    throw Error(kind, message, std::move(field));
}

}  // namespace kdva
