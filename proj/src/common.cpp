#include "specops/clock.hpp"
#include "specops/errors.hpp"
#include "specops/hash.hpp"
#include "specops/json_util.hpp"
#include "specops/roles.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specops {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidFeature: return "InvalidFeature";
    case ErrorCode::RoleViolation: return "RoleViolation";
    case ErrorCode::IncoherentRevision: return "IncoherentRevision";
    case ErrorCode::ProviderTimeout: return "ProviderTimeout";
    case ErrorCode::TranscriptExhausted: return "TranscriptExhausted";
    case ErrorCode::TranscriptMismatch: return "TranscriptMismatch";
    case ErrorCode::ToolHallucination: return "ToolHallucination";
    case ErrorCode::InvalidPricing: return "InvalidPricing";
    case ErrorCode::UnknownTool: return "UnknownTool";
    case ErrorCode::BadArgs: return "BadArgs";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::JailViolation: return "JailViolation";
    case ErrorCode::PrivilegeDenied: return "PrivilegeDenied";
    case ErrorCode::ScreenError: return "ScreenError";
    case ErrorCode::SpawnError: return "SpawnError";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::GenerationIncoherent: return "GenerationIncoherent";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::ClassificationRequired: return "ClassificationRequired";
    case ErrorCode::IncompleteAnnotation: return "IncompleteAnnotation";
    case ErrorCode::InvalidAnnotation: return "InvalidAnnotation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

const char* role_name(SpecialistRole role) {
    switch (role) {
    case SpecialistRole::TestArchitect: return "TestArchitect";
    case SpecialistRole::TestAnalyst: return "TestAnalyst";
    case SpecialistRole::InfrastructureManager: return "InfrastructureManager";
    case SpecialistRole::Engineer: return "Engineer";
    case SpecialistRole::Investigator: return "Investigator";
    case SpecialistRole::Judge: return "Judge";
    }
    return "?";
}

SpecialistRole role_from_name(const std::string& name) {
    for (SpecialistRole r : kAllRoles) {
        if (name == role_name(r)) return r;
    }
    throw SpecOpsError(ErrorCode::ConfigError, "unknown specialist role '" + name + "'");
}

const char* phase_name(Phase phase) {
    switch (phase) {
    case Phase::Generation: return "Generation";
    case Phase::Setup: return "Setup";
    case Phase::Execution: return "Execution";
    case Phase::Validation: return "Validation";
    }
    return "?";
}

Phase phase_from_name(const std::string& name) {
    for (Phase p : kAllPhases) {
        if (name == phase_name(p)) return p;
    }
    throw SpecOpsError(ErrorCode::ConfigError, "unknown phase '" + name + "'");
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecOpsError(ErrorCode::IoError, "cannot open " + path.string());
    Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw SpecOpsError(ErrorCode::IoError, "invalid JSON in " + path.string());
    return j;
}

void save_json_file(const std::filesystem::path& path, const Json& value) {
    std::ofstream out(path);
    if (!out) throw SpecOpsError(ErrorCode::IoError, "cannot write " + path.string());
    out << value.dump(2) << '\n';
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecOpsError(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Json try_parse_json(const std::string& text) {
    return Json::parse(text, nullptr, /*allow_exceptions=*/false);
}

namespace {

// Civil-date conversion without <chrono> calendar support (gcc 11).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

} // namespace

std::string format_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u %02lld:%02lld:%02lld", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::int64_t parse_utc(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6)
        throw SpecOpsError(ErrorCode::ConfigError, "bad timestamp '" + text + "'");
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 + h * 3600 + mi * 60 + s;
}

} // namespace specops
