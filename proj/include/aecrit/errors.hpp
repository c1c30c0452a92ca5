#pragma once

#include <stdexcept>
#include <string>

namespace aecrit {

/// Error codes surfaced by the toolkit. Each maps to one named failure mode
/// of an operation contract; the CLI translates them into exit codes > 2.
enum class Errc {
    NonPositiveMass,
    EmptyPartition,
    DegenerateInterval,
    NonFiniteIntegrand,
    EmptyGrid,
    UnsortedGrid,
    ZeroDenominator,
    WindowEmpty,
    BadThresholds,
    BadDegrees,
    Overflow,
    ConfigInvalid,
    InputNotFound,
    InvalidArgument,
    IoError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NonPositiveMass: return "NON_POSITIVE_MASS";
        case Errc::EmptyPartition: return "EMPTY_PARTITION";
        case Errc::DegenerateInterval: return "DEGENERATE_INTERVAL";
        case Errc::NonFiniteIntegrand: return "NON_FINITE_INTEGRAND";
        case Errc::EmptyGrid: return "EMPTY_GRID";
        case Errc::UnsortedGrid: return "UNSORTED_GRID";
        case Errc::ZeroDenominator: return "ZERO_DENOMINATOR";
        case Errc::WindowEmpty: return "WINDOW_EMPTY";
        case Errc::BadThresholds: return "BAD_THRESHOLDS";
        case Errc::BadDegrees: return "BAD_DEGREES";
        case Errc::Overflow: return "OVERFLOW";
        case Errc::ConfigInvalid: return "CONFIG_INVALID";
        case Errc::InputNotFound: return "INPUT_NOT_FOUND";
        case Errc::InvalidArgument: return "INVALID_ARGUMENT";
        case Errc::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

class ToolkitError : public std::runtime_error {
public:
    ToolkitError(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw ToolkitError(code, message);
}

}  // namespace aecrit
