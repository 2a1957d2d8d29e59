#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace monologue {

enum class ErrorCode {
    // pipeline-core
    StageOrderViolation,
    SessionComplete,
    StageNotReached,
    InvariantViolation,
    EmptyComponent,
    // ingestion
    UnreadableSource,
    EmptyBody,
    // prompt-kit
    MissingPlaceholder,
    IndexOutOfRange,
    // llm-gateway
    ConfigInvalid,
    MissingFixture,
    ProviderTimeout,
    ProviderRejected,
    ProviderUnavailable,
    RetriesExhausted,
    UnwritableFixtureDir,
    // stage-parser (surfaced by the workflow when an outcome is not Parsed)
    Unparseable,
    Rejected,
    // distance-engine
    DimensionMismatch,
    NotNormalized,
    MatrixCatalogMismatch,
    EmptyRanking,
    InvalidManualPick,
    // report / documents
    SessionTooEarly,
    InvalidDocument,
    // session-store
    StorageFailure,
    VersionConflict,
    NotFound,
};

std::string_view to_string(ErrorCode code);

// Exit code family used by the command line front end.
enum class ErrorFamily { Input, Provider, Parse, Conflict, Internal };
ErrorFamily family_of(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace monologue
