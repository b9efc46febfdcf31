#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specops/clock.hpp"
#include "specops/json_util.hpp"
#include "specops/llm_gateway.hpp"
#include "specops/mock_subjects.hpp"
#include "specops/roles.hpp"
#include "specops/spec_model.hpp"
#include "specops/test_env.hpp"

namespace specops::pipeline {

/// The five things a reported bug can be. Every bug report names exactly one.
enum class BugCriterion {
    DeviationFromExpected,
    Misreporting,
    CompletionImpact,
    QualityImpact,
    UnreasonableIntervention,
};

inline constexpr BugCriterion kAllBugCriteria[] = {
    BugCriterion::DeviationFromExpected, BugCriterion::Misreporting,
    BugCriterion::CompletionImpact, BugCriterion::QualityImpact,
    BugCriterion::UnreasonableIntervention,
};

const char* bug_criterion_name(BugCriterion c);
BugCriterion bug_criterion_from_name(const std::string& name);

/// Evidence references are resolved against the run record: capture
/// sequence numbers, environment diff keys (or "absent:<key>" for a
/// claim that something expected never appeared), and investigator
/// finding ids.
struct BugEvidence {
    std::vector<int> capture_seqs;
    std::vector<std::string> diff_entries;
    std::vector<std::string> finding_ids;

    bool empty() const {
        return capture_seqs.empty() && diff_entries.empty() && finding_ids.empty();
    }
    Json to_json() const;
    static BugEvidence from_json(const Json& j);
};

struct BugReport {
    BugCriterion criterion = BugCriterion::DeviationFromExpected;
    std::string description;
    BugEvidence evidence;
    std::vector<int> question_refs; // indices into the judge's question list

    Json to_json() const;
    static BugReport from_json(const Json& j);
};

struct JudgeQuestion {
    BugCriterion criterion = BugCriterion::DeviationFromExpected;
    std::string text;
};

struct JudgeAnswer {
    int question = -1;
    std::string text;
};

enum class RunOutcome { Pass, BugsFound, EnvironmentFailure };
const char* run_outcome_name(RunOutcome o);
RunOutcome run_outcome_from_name(const std::string& name);

struct Verdict {
    RunOutcome outcome = RunOutcome::Pass;
    std::string environment_fault; // set when outcome == EnvironmentFailure
    std::vector<BugReport> bugs;
    std::vector<JudgeQuestion> questions;
    std::vector<JudgeAnswer> answers;
    std::string summary;

    Json to_json() const;
    static Verdict from_json(const Json& j);
};

struct FaultPlan {
    env::FaultKind kind = env::FaultKind::NetworkDown;
    int count = -1; // -1 = armed for the whole run
};

struct RunConfig {
    spec::FeatureDescription feature;
    spec::AgentSpecification agent;
    mocks::BehaviorScript script;
    Json transcript = Json::array(); // scripted specialist replies
    std::vector<FaultPlan> faults;
    int max_retries = 3;
    int max_analyst_rounds = 3;
    int quiesce_seconds = 10;
    int max_wait_seconds = 120;
    std::int64_t start_epoch = LogicalClock::kDefaultEpoch;

    Json to_json() const;
    /// `base_dir` anchors relative *_path references inside the JSON.
    static RunConfig from_json(const Json& j, const std::filesystem::path& base_dir = {});
};

struct PhaseRecord {
    Phase phase = Phase::Generation;
    std::string status; // completed | aborted | skipped
    std::int64_t started_at = 0;
    std::int64_t finished_at = 0;
    std::string detail;

    Json to_json() const;
};

struct RunResult {
    Verdict verdict;
    spec::TestSpecification specification;
    std::vector<PhaseRecord> phases;
    Json setup_report = Json::object();
    Json evidence = Json::object();
    Json ledger = Json::object();
    std::filesystem::path record_dir;
};

/// Executes all four phases against a scripted environment under
/// `work_root` (jail in work_root/home, record in work_root/record) and
/// persists the full run record. Deterministic: identical config and
/// transcript give a byte-identical record.
RunResult run_test(const RunConfig& config, const std::filesystem::path& work_root);

} // namespace specops::pipeline
