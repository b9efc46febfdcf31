#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specops/json_util.hpp"
#include "specops/roles.hpp"

namespace specops::tools {

enum class ParamType { String, Int, Bool, StringList, Object };

struct ToolParam {
    std::string name;
    ParamType type = ParamType::String;
    bool required = true;
};

struct ToolSignature {
    std::string name;
    std::vector<ToolParam> params;
    std::string description;
};

struct ToolCall {
    std::string tool;
    Json args = Json::object();
    std::string call_id;

    Json to_json() const;
    static ToolCall from_json(const Json& j);
};

enum class ToolStatus { Ok, RetryableError, FatalError };

enum class FatalKind {
    None,
    UnknownTool,
    BadArgs,
    RetriesExhausted,
    JailViolation,
    PrivilegeDenied,
    ScreenError,
};

const char* tool_status_name(ToolStatus s);
const char* fatal_kind_name(FatalKind k);

/// Observations rendered back to a specialist are capped; the structured
/// payload keeps the full data for evidence and metrics.
inline constexpr std::size_t kObservationCap = 4000;

struct ToolResult {
    std::string call_id;
    ToolStatus status = ToolStatus::Ok;
    FatalKind fatal_kind = FatalKind::None;
    std::string observation; // text rendered for the LLM, capped at kObservationCap
    Json payload = Json::object();

    bool ok() const { return status == ToolStatus::Ok; }
    Json to_json() const;
};

/// What a handler produces; dispatch stamps the call_id and caps the observation.
struct ToolOutcome {
    ToolStatus status = ToolStatus::Ok;
    FatalKind fatal_kind = FatalKind::None;
    std::string observation;
    Json payload = Json::object();

    static ToolOutcome success(std::string observation, Json payload = Json::object());
    static ToolOutcome retryable(std::string feedback, Json payload = Json::object());
    static ToolOutcome fatal(FatalKind kind, std::string observation);
};

using ToolHandler = std::function<ToolOutcome(const ToolCall&)>;

/// A specialist's bounded action space. Immutable after pipeline start.
class Registry {
public:
    explicit Registry(SpecialistRole role) : role_(role) {}

    SpecialistRole role() const { return role_; }
    const std::vector<ToolSignature>& tools() const { return signatures_; }
    bool has_tool(const std::string& name) const;
    const ToolSignature* find_tool(const std::string& name) const;

    void register_tool(ToolSignature signature, ToolHandler handler);

    friend ToolResult dispatch(const Registry& registry, const ToolCall& call);

private:
    SpecialistRole role_;
    std::vector<ToolSignature> signatures_;
    std::vector<ToolHandler> handlers_;
};

/// Executes one call. Exactly one result per call; unknown tools and
/// malformed args come back as FatalError, never as exceptions.
ToolResult dispatch(const Registry& registry, const ToolCall& call);

struct RetriedResult {
    ToolResult result;
    int attempts = 0;
    std::vector<ToolStatus> attempt_statuses;
};

/// Re-dispatches on RetryableError until success or `max_retries` total
/// attempts. An exhausted retryable failure is promoted to
/// FatalError(RetriesExhausted); FatalError is never auto-retried.
RetriedResult retry_loop(const Registry& registry, const ToolCall& call, int max_retries);

std::string truncate_observation(std::string text);

} // namespace specops::tools
