#pragma once

#include <stdexcept>
#include <string>

namespace specops {

enum class ErrorCode {
    InvalidFeature,
    RoleViolation,
    IncoherentRevision,
    ProviderTimeout,
    TranscriptExhausted,
    TranscriptMismatch,
    ToolHallucination,
    InvalidPricing,
    UnknownTool,
    BadArgs,
    RetriesExhausted,
    JailViolation,
    PrivilegeDenied,
    ScreenError,
    SpawnError,
    SessionClosed,
    GenerationIncoherent,
    ProtocolViolation,
    ClassificationRequired,
    IncompleteAnnotation,
    InvalidAnnotation,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a stable error code plus human-readable detail.
class SpecOpsError : public std::runtime_error {
public:
    SpecOpsError(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace specops
