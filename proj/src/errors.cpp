#include "bt/errors.hpp"

namespace bt {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "Io";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::DuplicateBar: return "DuplicateBar";
        case ErrorKind::NonPositivePrice: return "NonPositivePrice";
        case ErrorKind::DateNotInCalendar: return "DateNotInCalendar";
        case ErrorKind::MonthMissing: return "MonthMissing";
        case ErrorKind::EmptyConstituency: return "EmptyConstituency";
        case ErrorKind::UniverseTooSmall: return "UniverseTooSmall";
        case ErrorKind::InsufficientEligibleSecurities:
            return "InsufficientEligibleSecurities";
        case ErrorKind::MissingReturn: return "MissingReturn";
        case ErrorKind::ZeroTotalWeight: return "ZeroTotalWeight";
        case ErrorKind::MissingBar: return "MissingBar";
        case ErrorKind::FeesExceedValue: return "FeesExceedValue";
        case ErrorKind::SpanTooShort: return "SpanTooShort";
        case ErrorKind::DegenerateSeries: return "DegenerateSeries";
        case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

bool is_data_error(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io:
        case ErrorKind::MalformedRow:
        case ErrorKind::DuplicateBar:
        case ErrorKind::NonPositivePrice:
        case ErrorKind::DateNotInCalendar:
        case ErrorKind::MonthMissing:
        case ErrorKind::SpanTooShort:
        case ErrorKind::InvalidInput:
            return true;
        default:
            return false;
    }
}

}  // namespace bt
