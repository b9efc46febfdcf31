#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specops/json_util.hpp"
#include "specops/llm_gateway.hpp"

namespace specops::metrics {

// Evaluation machinery: step discretization, planning and execution scoring,
// bug-detection confusion metrics with prompting success attribution,
// hallucination tallies, and cost aggregation. Everything here is a pure
// function over immutable inputs; the framework computes, it never
// adjudicates. Incorrect/missing/executed flags come from annotation files.

enum class StepPhase { Setup, Execution, Validation, Cleanup };

inline constexpr StepPhase kAllStepPhases[] = {StepPhase::Setup, StepPhase::Execution,
                                               StepPhase::Validation, StepPhase::Cleanup};

const char* step_phase_name(StepPhase p);
StepPhase step_phase_from_name(const std::string& name);

enum class StepKind {
    Navigation,
    DataExtraction,
    EmailCreation,
    AttachmentAdd,
    FileCreateWithContent,
    FileTouchOrMkdir,
    TerminalCommand,
    NaturalLanguage,
};

const char* step_kind_name(StepKind k);

struct DiscretizedStep {
    std::string id; // "<element id>#<ordinal>", ordinals start at 1
    StepPhase phase = StepPhase::Execution;
    StepKind kind = StepKind::NaturalLanguage;
    std::string source_ref; // id of the plan element this step came from
    std::string text;

    Json to_json() const;
};

/// Splits one shell command line into chained segments on &&, ||, ;, | and &.
/// Quoted operators do not split. Empty segments are dropped.
std::vector<std::string> split_command_chain(const std::string& command);

/// Turns a structured plan document into discrete steps.
///
/// The plan is a JSON array of elements (or an object with an "elements"
/// array). Every element carries "id", "phase" and "kind"; the remaining
/// fields depend on the kind:
///   email            to, subject, attachments[]      4 steps + 1 per attachment
///   file             path, content                   2 steps when content is non-empty, else 1
///   mkdir            path                            1 step
///   terminal         command                         1 step per chained segment
///   navigation       transitions[]                   1 step per transition
///   data_extraction  items[]                         1 step per item
///   natural_language statements[]                    1 step per statement, as presented
///
/// An element with a missing or unknown kind, or without a phase, is
/// surfaced for annotation via ClassificationRequired. Never guessed.
std::vector<DiscretizedStep> discretize(const Json& plan);

struct StepAnnotation {
    std::string step_id;
    std::optional<StepPhase> phase; // required when missing=true, ignored otherwise
    bool planned_correct = true;
    bool missing = false; // a necessary step the plan does not contain
    bool executed_ok = true;
    std::optional<std::string> dependency;

    Json to_json() const;
    static StepAnnotation from_json(const Json& j);
};

/// Parses JSON-lines annotation text, one object per line. Blank lines are
/// skipped; a malformed line raises InvalidAnnotation with its line number.
std::vector<StepAnnotation> parse_step_annotations(const std::string& jsonl);

struct PhasePlanning {
    int total = 0;
    int incorrect = 0;
    int missing = 0;

    std::optional<double> incorrect_pct() const; // unrounded; empty when total == 0
};

struct PlanningScore {
    std::map<StepPhase, PhasePlanning> phases; // all four phases always present

    Json to_json() const;
};

PlanningScore score_planning(const std::vector<DiscretizedStep>& steps,
                             const std::vector<StepAnnotation>& annotations);

struct PhaseExecution {
    int total = 0;
    int succeeded = 0;

    std::optional<double> success_pct() const; // unrounded; empty when total == 0
};

struct ExecutionScore {
    std::map<StepPhase, PhaseExecution> phases;
    std::vector<std::string> corrections; // steps flipped to failed by dependency propagation

    Json to_json() const;
};

/// Success ratio per phase after dependency propagation: a step whose
/// (transitive) dependency failed counts as failed no matter how it was
/// annotated; each such flip is recorded as a warning. A dependency cycle
/// raises InvalidAnnotation.
ExecutionScore score_execution(const std::vector<DiscretizedStep>& steps,
                               const std::vector<StepAnnotation>& annotations);

enum class BugLabelKind { TP, FP, FN };

const char* bug_label_name(BugLabelKind k);
BugLabelKind bug_label_from_name(const std::string& name);

struct BugLabel {
    std::string report_id;
    BugLabelKind label = BugLabelKind::FP;
    bool env_setup_caused = false;  // setup failures are never the agent's fault
    bool prompt_successful = true;  // flag of the test this label belongs to

    Json to_json() const;
    static BugLabel from_json(const Json& j);
};

std::vector<BugLabel> parse_bug_labels(const std::string& jsonl);

struct TestCensus {
    int total = 0;
    int successful_prompts = 0;
};

struct ConfusionMetrics {
    int tp = 0;
    int fp = 0; // headline count, unsuccessful-prompt FPs included
    int fn = 0;
    int excluded_fps = 0; // the unsuccessful-prompt subset, reported separately
    int tests_total = 0;
    int tests_successful = 0;

    int bugs_triggered() const { return tp + fn; }
    double psr_pct() const; // unrounded
    std::optional<double> precision() const; // empty when TP+FP == 0
    std::optional<double> recall() const;    // empty when TP+FN == 0
    std::optional<double> f1() const;        // empty when either factor is

    Json to_json() const; // rounded for display, raw counts preserved
};

/// Aggregates bug labels into confusion metrics. Enforces the labeling
/// invariants: env_setup_caused or an unsuccessful prompt force the FP
/// label; violations raise InvalidAnnotation.
ConfusionMetrics bug_confusion(const std::vector<BugLabel>& labels, const TestCensus& tests);

enum class HallucinationCategory {
    InputConflicting,
    Ui,
    ApiTool,
    Algorithmic,
    FalseValidation,
    Miscellaneous,
};

inline constexpr HallucinationCategory kAllHallucinationCategories[] = {
    HallucinationCategory::InputConflicting, HallucinationCategory::Ui,
    HallucinationCategory::ApiTool,          HallucinationCategory::Algorithmic,
    HallucinationCategory::FalseValidation,  HallucinationCategory::Miscellaneous};

const char* hallucination_category_name(HallucinationCategory c);
HallucinationCategory hallucination_category_from_name(const std::string& name);

struct HallucinationTag {
    HallucinationCategory category = HallucinationCategory::Miscellaneous;
    std::string failure_ref;

    Json to_json() const;
    static HallucinationTag from_json(const Json& j);
};

std::vector<HallucinationTag> parse_hallucination_tags(const std::string& jsonl);

struct HallucinationReport {
    std::map<HallucinationCategory, int> counts; // every category present
    int total = 0;

    Json to_json() const;
};

HallucinationReport hallucination_report(const std::vector<HallucinationTag>& tags);

// Rounding convention used by every report: percentages to one decimal
// place, metrics to two, halves away from zero.
double round_places(double value, int places);
std::string format_pct(std::optional<double> pct);      // "96.0%", or "--" when empty
std::string format_metric(std::optional<double> value); // "0.92", or "-" when empty
std::string format_ratio(const PhaseExecution& p);      // "96.0% (1551/1615)", or "--"

/// Aligned columns with a dashed rule under the header. The building block
/// of every plain-text report.
std::string render_table(const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows);

// Canned tables, one row per labeled input.
std::string render_planning_table(const std::vector<std::pair<std::string, PlanningScore>>& rows);
std::string render_execution_table(const std::vector<std::pair<std::string, ExecutionScore>>& rows);
std::string render_confusion_table(const std::vector<std::pair<std::string, ConfusionMetrics>>& rows);
std::string render_hallucination_table(
    const std::vector<std::pair<std::string, HallucinationReport>>& rows);

} // namespace specops::metrics
