#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace levyfluct {

enum class ErrorKind {
    MonotonePath,
    BadMixture,
    NegativeParameter,
    DomainError,
    ConvergenceFailure,
    FactorizationFailure,
    UnsupportedBackend,
    AdmissibilityError,
    DivergedTransform,
    UnsupportedSpec,
    NonTermination,
    ParseError,
    UnknownKey,
    InvalidValue,
    IoError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::MonotonePath: return "MonotonePath";
    case ErrorKind::BadMixture: return "BadMixture";
    case ErrorKind::NegativeParameter: return "NegativeParameter";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::FactorizationFailure: return "FactorizationFailure";
    case ErrorKind::UnsupportedBackend: return "UnsupportedBackend";
    case ErrorKind::AdmissibilityError: return "AdmissibilityError";
    case ErrorKind::DivergedTransform: return "DivergedTransform";
    case ErrorKind::UnsupportedSpec: return "UnsupportedSpec";
    case ErrorKind::NonTermination: return "NonTermination";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace levyfluct
