#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specops/json_util.hpp"
#include "specops/roles.hpp"
#include "specops/tool_protocol.hpp"

namespace specops::llm {

enum class MessageAuthor { User, Assistant, ToolResult };

struct Message {
    MessageAuthor author = MessageAuthor::User;
    std::string content;
    std::optional<int> image_seq; // reference to a captured frame, when multimodal
};

struct CompletionRequest {
    SpecialistRole role = SpecialistRole::TestArchitect;
    std::string system_prompt;
    std::vector<Message> messages;
    std::vector<tools::ToolSignature> available_tools;
};

struct TokenUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;

    TokenUsage& operator+=(const TokenUsage& other) {
        input_tokens += other.input_tokens;
        output_tokens += other.output_tokens;
        return *this;
    }
    bool operator==(const TokenUsage&) const = default;
};

struct CompletionResponse {
    std::string content;
    std::vector<tools::ToolCall> tool_calls;
    TokenUsage usage;
};

/// Digest of a request, used by scripted transcripts to pin the exact
/// prompt a canned reply answers.
std::string request_digest(const CompletionRequest& request);

/// Per-(role, phase) token accounting plus per-phase wall clock.
class TokenLedger {
public:
    void record(SpecialistRole role, Phase phase, const TokenUsage& usage);
    void record_phase_seconds(Phase phase, std::int64_t seconds);

    TokenUsage role_total(SpecialistRole role) const;
    TokenUsage phase_total(Phase phase) const;
    TokenUsage grand_total() const;
    std::int64_t phase_seconds(Phase phase) const;
    std::int64_t total_seconds() const;

    const std::map<std::pair<SpecialistRole, Phase>, TokenUsage>& cells() const { return cells_; }

    Json to_json() const;

private:
    std::map<std::pair<SpecialistRole, Phase>, TokenUsage> cells_;
    std::map<Phase, std::int64_t> wall_seconds_;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

/// Deterministic replay provider. Entries are keyed by (role, per-role turn
/// index); an entry with an expected digest fails loudly on mismatch instead
/// of answering, so drifted tests cannot pass silently.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(const Json& transcript);

    CompletionResponse complete(const CompletionRequest& request) override;

    /// Entries remaining across all roles (0 when fully consumed).
    std::size_t remaining() const;

private:
    struct Entry {
        std::string expected_digest;
        CompletionResponse response;
    };
    std::map<SpecialistRole, std::deque<Entry>> queues_;
};

/// Minimal client for a generic chat-completions HTTP endpoint. Vendor wire
/// formats are adapter concerns layered on top of this shape.
class HttpProvider : public Provider {
public:
    HttpProvider(std::string host, int port, std::string path = "/v1/chat/completions");

    CompletionResponse complete(const CompletionRequest& request) override;

private:
    std::string host_;
    int port_;
    std::string path_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::int64_t initial_backoff_ms = 1000;
    // Injectable so tests never sleep for real.
    std::function<void(std::int64_t)> sleep_ms;
};

/// Uniform completion front door: retries timeouts, validates tool calls
/// against the request's registry slice, and books usage into the ledger.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Provider> provider, RetryPolicy retry = {});

    void set_phase(Phase phase) { phase_ = phase; }
    Phase phase() const { return phase_; }

    CompletionResponse complete(const CompletionRequest& request);

    TokenLedger& ledger() { return ledger_; }
    const TokenLedger& ledger() const { return ledger_; }

private:
    std::shared_ptr<Provider> provider_;
    RetryPolicy retry_;
    TokenLedger ledger_;
    Phase phase_ = Phase::Generation;
};

struct PricingTable {
    double input_per_million = 0.0;
    double output_per_million = 0.0;

    static PricingTable from_json(const Json& j);
};

/// Dollar cost of a ledger under a pricing table. Throws InvalidPricing on
/// negative rates.
double cost_estimate(const TokenLedger& ledger, const PricingTable& pricing);
double cost_estimate(const TokenUsage& usage, const PricingTable& pricing);

/// Transcript entry shape: {role, turn, expected_digest?, content,
/// tool_calls?, usage}. See ScriptedProvider.
Json make_transcript_entry(SpecialistRole role, int turn, const std::string& content,
                           const std::vector<tools::ToolCall>& tool_calls = {}, TokenUsage usage = {},
                           const std::string& expected_digest = "");

} // namespace specops::llm
