#include "monologue/error.hpp"

namespace monologue {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::StageOrderViolation: return "StageOrderViolation";
    case ErrorCode::SessionComplete: return "SessionComplete";
    case ErrorCode::StageNotReached: return "StageNotReached";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EmptyComponent: return "EmptyComponent";
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::EmptyBody: return "EmptyBody";
    case ErrorCode::MissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MissingFixture: return "MissingFixture";
    case ErrorCode::ProviderTimeout: return "ProviderTimeout";
    case ErrorCode::ProviderRejected: return "ProviderRejected";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::UnwritableFixtureDir: return "UnwritableFixtureDir";
    case ErrorCode::Unparseable: return "Unparseable";
    case ErrorCode::Rejected: return "Rejected";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::MatrixCatalogMismatch: return "MatrixCatalogMismatch";
    case ErrorCode::EmptyRanking: return "EmptyRanking";
    case ErrorCode::InvalidManualPick: return "InvalidManualPick";
    case ErrorCode::SessionTooEarly: return "SessionTooEarly";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::NotFound: return "NotFound";
    }
    return "Unknown";
}

ErrorFamily family_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnreadableSource:
    case ErrorCode::EmptyBody:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvariantViolation:
    case ErrorCode::EmptyComponent:
    case ErrorCode::InvalidManualPick:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::MissingPlaceholder:
    case ErrorCode::InvalidDocument:
    case ErrorCode::NotFound:
    case ErrorCode::SessionTooEarly:
        return ErrorFamily::Input;
    case ErrorCode::MissingFixture:
    case ErrorCode::ProviderTimeout:
    case ErrorCode::ProviderRejected:
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::RetriesExhausted:
    case ErrorCode::UnwritableFixtureDir:
        return ErrorFamily::Provider;
    case ErrorCode::Unparseable:
    case ErrorCode::Rejected:
        return ErrorFamily::Parse;
    case ErrorCode::StageOrderViolation:
    case ErrorCode::SessionComplete:
    case ErrorCode::StageNotReached:
    case ErrorCode::VersionConflict:
        return ErrorFamily::Conflict;
    default:
        return ErrorFamily::Internal;
    }
}

} // namespace monologue
