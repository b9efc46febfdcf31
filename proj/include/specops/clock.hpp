#pragma once

#include <cstdint>
#include <string>

namespace specops {

/// Deterministic time source. All timestamps inside a pipeline run come from
/// one of these, so scripted runs serialize byte-identically.
class LogicalClock {
public:
    // Default epoch: 2025-05-13 09:00:00 UTC, the morning after the scenario
    // fixtures' "yesterday" emails.
    static constexpr std::int64_t kDefaultEpoch = 1747126800;

    explicit LogicalClock(std::int64_t epoch_seconds = kDefaultEpoch) : now_(epoch_seconds) {}

    std::int64_t now() const { return now_; }
    void advance(std::int64_t seconds) { now_ += seconds; }
    void set(std::int64_t epoch_seconds) { now_ = epoch_seconds; }

private:
    std::int64_t now_;
};

/// Renders epoch seconds as "YYYY-MM-DD HH:MM:SS" UTC.
std::string format_utc(std::int64_t epoch_seconds);

/// Parses "YYYY-MM-DD HH:MM:SS" (UTC) back to epoch seconds.
std::int64_t parse_utc(const std::string& text);

} // namespace specops
