#include "specops/llm_gateway.hpp"

#include "specops/errors.hpp"
#include "specops/hash.hpp"

#include <algorithm>

#include "httplib.h"

namespace specops::llm {

std::string request_digest(const CompletionRequest& request) {
    std::string blob = role_name(request.role);
    blob += '\x1f';
    blob += request.system_prompt;
    for (const auto& msg : request.messages) {
        blob += '\x1f';
        blob += std::to_string(static_cast<int>(msg.author));
        blob += ':';
        blob += msg.content;
    }
    for (const auto& sig : request.available_tools) {
        blob += '\x1f';
        blob += sig.name;
    }
    return content_digest(blob);
}

void TokenLedger::record(SpecialistRole role, Phase phase, const TokenUsage& usage) {
    cells_[{role, phase}] += usage;
}

void TokenLedger::record_phase_seconds(Phase phase, std::int64_t seconds) { wall_seconds_[phase] += seconds; }

TokenUsage TokenLedger::role_total(SpecialistRole role) const {
    TokenUsage total;
    for (const auto& [key, usage] : cells_)
        if (key.first == role) total += usage;
    return total;
}

TokenUsage TokenLedger::phase_total(Phase phase) const {
    TokenUsage total;
    for (const auto& [key, usage] : cells_)
        if (key.second == phase) total += usage;
    return total;
}

TokenUsage TokenLedger::grand_total() const {
    TokenUsage total;
    for (const auto& [key, usage] : cells_) total += usage;
    return total;
}

std::int64_t TokenLedger::phase_seconds(Phase phase) const {
    auto it = wall_seconds_.find(phase);
    return it == wall_seconds_.end() ? 0 : it->second;
}

std::int64_t TokenLedger::total_seconds() const {
    std::int64_t total = 0;
    for (const auto& [phase, secs] : wall_seconds_) total += secs;
    return total;
}

Json TokenLedger::to_json() const {
    Json j;
    Json cells = Json::array();
    for (const auto& [key, usage] : cells_) {
        Json cell;
        cell["role"] = role_name(key.first);
        cell["phase"] = phase_name(key.second);
        cell["input_tokens"] = usage.input_tokens;
        cell["output_tokens"] = usage.output_tokens;
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    Json phases = Json::object();
    for (Phase p : kAllPhases) {
        Json entry;
        TokenUsage usage = phase_total(p);
        entry["input_tokens"] = usage.input_tokens;
        entry["output_tokens"] = usage.output_tokens;
        entry["wall_seconds"] = phase_seconds(p);
        phases[phase_name(p)] = std::move(entry);
    }
    j["phases"] = std::move(phases);
    Json roles = Json::object();
    for (SpecialistRole r : kAllRoles) {
        Json entry;
        TokenUsage usage = role_total(r);
        entry["input_tokens"] = usage.input_tokens;
        entry["output_tokens"] = usage.output_tokens;
        roles[role_name(r)] = std::move(entry);
    }
    j["roles"] = std::move(roles);
    TokenUsage total = grand_total();
    j["total"] = Json{{"input_tokens", total.input_tokens}, {"output_tokens", total.output_tokens}};
    j["total_wall_seconds"] = total_seconds();
    return j;
}

ScriptedProvider::ScriptedProvider(const Json& transcript) {
    if (!transcript.is_array())
        throw SpecOpsError(ErrorCode::ConfigError, "transcript must be a JSON array");
    std::map<SpecialistRole, int> expected_turn;
    for (const auto& raw : transcript) {
        SpecialistRole role = role_from_name(raw.value("role", ""));
        int turn = raw.value("turn", -1);
        if (turn != expected_turn[role])
            throw SpecOpsError(ErrorCode::ConfigError,
                               std::string("transcript turns for ") + role_name(role) +
                                   " must be contiguous from 0; got " + std::to_string(turn));
        expected_turn[role] = turn + 1;

        Entry entry;
        entry.expected_digest = raw.value("expected_digest", "");
        entry.response.content = raw.value("content", "");
        for (const auto& call : raw.value("tool_calls", Json::array()))
            entry.response.tool_calls.push_back(tools::ToolCall::from_json(call));
        const Json usage = raw.value("usage", Json::object());
        entry.response.usage.input_tokens = usage.value("input_tokens", std::int64_t{0});
        entry.response.usage.output_tokens = usage.value("output_tokens", std::int64_t{0});
        queues_[role].push_back(std::move(entry));
    }
}

CompletionResponse ScriptedProvider::complete(const CompletionRequest& request) {
    auto it = queues_.find(request.role);
    if (it == queues_.end() || it->second.empty())
        throw SpecOpsError(ErrorCode::TranscriptExhausted,
                           std::string("no scripted reply left for ") + role_name(request.role));
    Entry entry = std::move(it->second.front());
    it->second.pop_front();
    if (!entry.expected_digest.empty()) {
        const std::string actual = request_digest(request);
        if (actual != entry.expected_digest)
            throw SpecOpsError(ErrorCode::TranscriptMismatch,
                               std::string("prompt digest mismatch for ") + role_name(request.role) +
                                   ": expected " + entry.expected_digest + ", got " + actual);
    }
    return entry.response;
}

std::size_t ScriptedProvider::remaining() const {
    std::size_t count = 0;
    for (const auto& [role, queue] : queues_) count += queue.size();
    return count;
}

HttpProvider::HttpProvider(std::string host, int port, std::string path)
    : host_(std::move(host)), port_(port), path_(std::move(path)) {}

CompletionResponse HttpProvider::complete(const CompletionRequest& request) {
    Json body;
    body["role"] = role_name(request.role);
    body["system"] = request.system_prompt;
    Json messages = Json::array();
    for (const auto& msg : request.messages) {
        Json m;
        switch (msg.author) {
        case MessageAuthor::User: m["author"] = "user"; break;
        case MessageAuthor::Assistant: m["author"] = "assistant"; break;
        case MessageAuthor::ToolResult: m["author"] = "tool_result"; break;
        }
        m["content"] = msg.content;
        if (msg.image_seq) m["image_seq"] = *msg.image_seq;
        messages.push_back(std::move(m));
    }
    body["messages"] = std::move(messages);
    Json tool_list = Json::array();
    for (const auto& sig : request.available_tools) {
        Json t;
        t["name"] = sig.name;
        t["description"] = sig.description;
        tool_list.push_back(std::move(t));
    }
    body["tools"] = std::move(tool_list);

    httplib::Client client(host_, port_);
    client.set_read_timeout(30, 0);
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res)
        throw SpecOpsError(ErrorCode::ProviderTimeout, "no response from " + host_ + ":" + std::to_string(port_));
    if (res->status != 200)
        throw SpecOpsError(ErrorCode::ProviderTimeout, "provider returned status " + std::to_string(res->status));

    Json reply = try_parse_json(res->body);
    if (reply.is_discarded())
        throw SpecOpsError(ErrorCode::ProviderTimeout, "provider returned invalid JSON");
    CompletionResponse response;
    response.content = reply.value("content", "");
    for (const auto& call : reply.value("tool_calls", Json::array()))
        response.tool_calls.push_back(tools::ToolCall::from_json(call));
    const Json usage = reply.value("usage", Json::object());
    response.usage.input_tokens = usage.value("input_tokens", std::int64_t{0});
    response.usage.output_tokens = usage.value("output_tokens", std::int64_t{0});
    return response;
}

Gateway::Gateway(std::shared_ptr<Provider> provider, RetryPolicy retry)
    : provider_(std::move(provider)), retry_(std::move(retry)) {
    if (!retry_.sleep_ms) retry_.sleep_ms = [](std::int64_t) {};
}

CompletionResponse Gateway::complete(const CompletionRequest& request) {
    if (request.messages.empty())
        throw SpecOpsError(ErrorCode::ConfigError, "completion request has no messages");

    CompletionResponse response;
    std::int64_t backoff = retry_.initial_backoff_ms;
    for (int attempt = 1;; ++attempt) {
        try {
            response = provider_->complete(request);
            break;
        } catch (const SpecOpsError& err) {
            if (err.code() != ErrorCode::ProviderTimeout || attempt >= retry_.max_attempts) throw;
            retry_.sleep_ms(backoff);
            backoff *= 2;
        }
    }

    for (const auto& call : response.tool_calls) {
        bool known = std::any_of(request.available_tools.begin(), request.available_tools.end(),
                                 [&](const tools::ToolSignature& sig) { return sig.name == call.tool; });
        if (!known) throw SpecOpsError(ErrorCode::ToolHallucination, call.tool);
    }
    if (response.usage.input_tokens < 0 || response.usage.output_tokens < 0)
        throw SpecOpsError(ErrorCode::ProtocolViolation, "negative token usage reported");

    ledger_.record(request.role, phase_, response.usage);
    return response;
}

PricingTable PricingTable::from_json(const Json& j) {
    PricingTable table;
    table.input_per_million = j.value("input_per_million", 0.0);
    table.output_per_million = j.value("output_per_million", 0.0);
    return table;
}

double cost_estimate(const TokenUsage& usage, const PricingTable& pricing) {
    if (pricing.input_per_million < 0 || pricing.output_per_million < 0)
        throw SpecOpsError(ErrorCode::InvalidPricing, "pricing rates must be non-negative");
    return static_cast<double>(usage.input_tokens) / 1e6 * pricing.input_per_million +
           static_cast<double>(usage.output_tokens) / 1e6 * pricing.output_per_million;
}

double cost_estimate(const TokenLedger& ledger, const PricingTable& pricing) {
    if (pricing.input_per_million < 0 || pricing.output_per_million < 0)
        throw SpecOpsError(ErrorCode::InvalidPricing, "pricing rates must be non-negative");
    double total = 0.0;
    for (SpecialistRole role : kAllRoles) total += cost_estimate(ledger.role_total(role), pricing);
    return total;
}

Json make_transcript_entry(SpecialistRole role, int turn, const std::string& content,
                           const std::vector<tools::ToolCall>& tool_calls, TokenUsage usage,
                           const std::string& expected_digest) {
    Json entry;
    entry["role"] = role_name(role);
    entry["turn"] = turn;
    if (!expected_digest.empty()) entry["expected_digest"] = expected_digest;
    entry["content"] = content;
    if (!tool_calls.empty()) {
        Json calls = Json::array();
        for (const auto& call : tool_calls) calls.push_back(call.to_json());
        entry["tool_calls"] = std::move(calls);
    }
    entry["usage"] = Json{{"input_tokens", usage.input_tokens}, {"output_tokens", usage.output_tokens}};
    return entry;
}

} // namespace specops::llm
