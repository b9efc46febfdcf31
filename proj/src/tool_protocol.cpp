#include "specops/tool_protocol.hpp"

#include "specops/errors.hpp"

#include <algorithm>

namespace specops::tools {

const char* tool_status_name(ToolStatus s) {
    switch (s) {
    case ToolStatus::Ok: return "Ok";
    case ToolStatus::RetryableError: return "RetryableError";
    case ToolStatus::FatalError: return "FatalError";
    }
    return "?";
}

const char* fatal_kind_name(FatalKind k) {
    switch (k) {
    case FatalKind::None: return "None";
    case FatalKind::UnknownTool: return "UnknownTool";
    case FatalKind::BadArgs: return "BadArgs";
    case FatalKind::RetriesExhausted: return "RetriesExhausted";
    case FatalKind::JailViolation: return "JailViolation";
    case FatalKind::PrivilegeDenied: return "PrivilegeDenied";
    case FatalKind::ScreenError: return "ScreenError";
    }
    return "?";
}

Json ToolCall::to_json() const {
    Json j;
    j["tool"] = tool;
    j["args"] = args;
    j["call_id"] = call_id;
    return j;
}

ToolCall ToolCall::from_json(const Json& j) {
    ToolCall call;
    call.tool = j.value("tool", "");
    call.args = j.value("args", Json::object());
    call.call_id = j.value("call_id", "");
    return call;
}

Json ToolResult::to_json() const {
    Json j;
    j["call_id"] = call_id;
    j["status"] = tool_status_name(status);
    if (status == ToolStatus::FatalError) j["fatal_kind"] = fatal_kind_name(fatal_kind);
    j["observation"] = observation;
    j["payload"] = payload;
    return j;
}

ToolOutcome ToolOutcome::success(std::string observation, Json payload) {
    return ToolOutcome{ToolStatus::Ok, FatalKind::None, std::move(observation), std::move(payload)};
}

ToolOutcome ToolOutcome::retryable(std::string feedback, Json payload) {
    return ToolOutcome{ToolStatus::RetryableError, FatalKind::None, std::move(feedback), std::move(payload)};
}

ToolOutcome ToolOutcome::fatal(FatalKind kind, std::string observation) {
    return ToolOutcome{ToolStatus::FatalError, kind, std::move(observation), Json::object()};
}

std::string truncate_observation(std::string text) {
    if (text.size() <= kObservationCap) return text;
    text.resize(kObservationCap);
    return text + "...[truncated]";
}

bool Registry::has_tool(const std::string& name) const { return find_tool(name) != nullptr; }

const ToolSignature* Registry::find_tool(const std::string& name) const {
    for (const auto& sig : signatures_)
        if (sig.name == name) return &sig;
    return nullptr;
}

void Registry::register_tool(ToolSignature signature, ToolHandler handler) {
    if (has_tool(signature.name))
        throw SpecOpsError(ErrorCode::ConfigError, "duplicate tool '" + signature.name + "' in registry");
    signatures_.push_back(std::move(signature));
    handlers_.push_back(std::move(handler));
}

namespace {

bool arg_matches_type(const Json& value, ParamType type) {
    switch (type) {
    case ParamType::String: return value.is_string();
    case ParamType::Int: return value.is_number_integer();
    case ParamType::Bool: return value.is_boolean();
    case ParamType::StringList:
        return value.is_array() &&
               std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_string(); });
    case ParamType::Object: return value.is_object();
    }
    return false;
}

std::optional<std::string> validate_args(const ToolSignature& sig, const Json& args) {
    if (!args.is_object()) return "args must be an object";
    for (const auto& param : sig.params) {
        auto it = args.find(param.name);
        if (it == args.end()) {
            if (param.required) return "missing required arg '" + param.name + "'";
            continue;
        }
        if (!arg_matches_type(*it, param.type)) return "arg '" + param.name + "' has wrong type";
    }
    for (auto it = args.begin(); it != args.end(); ++it) {
        bool known = std::any_of(sig.params.begin(), sig.params.end(),
                                 [&](const ToolParam& p) { return p.name == it.key(); });
        if (!known) return "unknown arg '" + it.key() + "'";
    }
    return std::nullopt;
}

} // namespace

ToolResult dispatch(const Registry& registry, const ToolCall& call) {
    ToolResult result;
    result.call_id = call.call_id;

    const ToolSignature* sig = nullptr;
    std::size_t index = 0;
    for (; index < registry.signatures_.size(); ++index) {
        if (registry.signatures_[index].name == call.tool) {
            sig = &registry.signatures_[index];
            break;
        }
    }
    if (sig == nullptr) {
        result.status = ToolStatus::FatalError;
        result.fatal_kind = FatalKind::UnknownTool;
        result.observation = "tool '" + call.tool + "' is not available to " + role_name(registry.role());
        return result;
    }

    if (auto problem = validate_args(*sig, call.args)) {
        result.status = ToolStatus::FatalError;
        result.fatal_kind = FatalKind::BadArgs;
        result.observation = "invalid arguments for '" + call.tool + "': " + *problem;
        return result;
    }

    ToolOutcome outcome = registry.handlers_[index](call);
    result.status = outcome.status;
    result.fatal_kind = outcome.fatal_kind;
    result.observation = truncate_observation(std::move(outcome.observation));
    result.payload = std::move(outcome.payload);
    return result;
}

RetriedResult retry_loop(const Registry& registry, const ToolCall& call, int max_retries) {
    if (max_retries < 1) throw SpecOpsError(ErrorCode::ConfigError, "max_retries must be >= 1");

    RetriedResult out;
    for (int attempt = 1; attempt <= max_retries; ++attempt) {
        out.result = dispatch(registry, call);
        out.attempts = attempt;
        out.attempt_statuses.push_back(out.result.status);
        if (out.result.status != ToolStatus::RetryableError) return out;
    }
    // Exhausted: promote the final retryable failure.
    out.result.status = ToolStatus::FatalError;
    out.result.fatal_kind = FatalKind::RetriesExhausted;
    out.result.observation =
        truncate_observation("retries exhausted after " + std::to_string(max_retries) +
                             " attempts; last error: " + out.result.observation);
    return out;
}

} // namespace specops::tools
