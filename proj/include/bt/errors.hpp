#pragma once

#include <stdexcept>
#include <string>

namespace bt {

enum class ErrorKind {
    Io,
    MalformedRow,
    DuplicateBar,
    NonPositivePrice,
    DateNotInCalendar,
    MonthMissing,
    EmptyConstituency,
    UniverseTooSmall,
    InsufficientEligibleSecurities,
    MissingReturn,
    ZeroTotalWeight,
    MissingBar,
    FeesExceedValue,
    SpanTooShort,
    DegenerateSeries,
    InvalidInput,
};

const char* to_string(ErrorKind kind);

/// Single exception type for all domain failures. `kind` drives the CLI
/// exit code: data problems exit 2, infeasible strategies exit 3.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// True for errors caused by bad or missing input data (as opposed to a
/// strategy that cannot be run on otherwise valid data).
bool is_data_error(ErrorKind kind);

}  // namespace bt
