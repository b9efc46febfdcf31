#include "specops/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "specops/errors.hpp"

namespace specops::metrics {

const char* step_phase_name(StepPhase p) {
    switch (p) {
        case StepPhase::Setup: return "setup";
        case StepPhase::Execution: return "execution";
        case StepPhase::Validation: return "validation";
        case StepPhase::Cleanup: return "cleanup";
    }
    return "unknown";
}

StepPhase step_phase_from_name(const std::string& name) {
    for (StepPhase p : kAllStepPhases) {
        if (name == step_phase_name(p)) return p;
    }
    throw SpecOpsError(ErrorCode::InvalidAnnotation, "unknown step phase '" + name + "'");
}

const char* step_kind_name(StepKind k) {
    switch (k) {
        case StepKind::Navigation: return "navigation";
        case StepKind::DataExtraction: return "data_extraction";
        case StepKind::EmailCreation: return "email_creation";
        case StepKind::AttachmentAdd: return "attachment_add";
        case StepKind::FileCreateWithContent: return "file_create_with_content";
        case StepKind::FileTouchOrMkdir: return "file_touch_or_mkdir";
        case StepKind::TerminalCommand: return "terminal_command";
        case StepKind::NaturalLanguage: return "natural_language";
    }
    return "unknown";
}

Json DiscretizedStep::to_json() const {
    Json j;
    j["id"] = id;
    j["phase"] = step_phase_name(phase);
    j["kind"] = step_kind_name(kind);
    j["source_ref"] = source_ref;
    j["text"] = text;
    return j;
}

std::vector<std::string> split_command_chain(const std::string& command) {
    std::vector<std::string> segments;
    std::string current;
    bool single = false;
    bool dbl = false;
    auto flush = [&] {
        const auto begin = current.find_first_not_of(" \t");
        if (begin != std::string::npos) {
            const auto end = current.find_last_not_of(" \t");
            segments.push_back(current.substr(begin, end - begin + 1));
        }
        current.clear();
    };
    for (std::size_t i = 0; i < command.size(); ++i) {
        const char c = command[i];
        if (c == '\'' && !dbl) single = !single;
        if (c == '"' && !single) dbl = !dbl;
        if (!single && !dbl) {
            if ((c == '&' || c == '|') && i + 1 < command.size() && command[i + 1] == c) {
                flush();
                ++i;
                continue;
            }
            if (c == '&' || c == '|' || c == ';') {
                flush();
                continue;
            }
        }
        current.push_back(c);
    }
    flush();
    return segments;
}

namespace {

[[noreturn]] void unclassified(const std::string& id, const std::string& why) {
    throw SpecOpsError(ErrorCode::ClassificationRequired, "plan element " + id + " " + why);
}

std::vector<std::string> string_list(const Json& element, const char* key) {
    std::vector<std::string> out;
    for (const auto& v : element.value(key, Json::array())) out.push_back(v.get<std::string>());
    return out;
}

} // namespace

std::vector<DiscretizedStep> discretize(const Json& plan) {
    const Json& elements = plan.is_array() ? plan : plan.at("elements");
    std::vector<DiscretizedStep> steps;
    int index = 0;
    for (const auto& element : elements) {
        ++index;
        std::string id = element.value("id", "");
        if (id.empty()) id = "e" + std::to_string(index);
        if (!element.contains("kind")) unclassified(id, "has no kind");
        if (!element.contains("phase")) unclassified(id, "has no phase");
        const std::string kind = element.at("kind").get<std::string>();
        const StepPhase phase = step_phase_from_name(element.at("phase").get<std::string>());
        int ordinal = 0;
        auto emit = [&](StepKind k, std::string text) {
            DiscretizedStep s;
            s.id = id + "#" + std::to_string(++ordinal);
            s.phase = phase;
            s.kind = k;
            s.source_ref = id;
            s.text = std::move(text);
            steps.push_back(std::move(s));
        };
        if (kind == "email") {
            const std::string to = element.value("to", "");
            const std::string subject = element.value("subject", "");
            emit(StepKind::EmailCreation,
                 to.empty() ? "set the recipient" : "set the recipient to " + to);
            emit(StepKind::EmailCreation,
                 subject.empty() ? "set the subject" : "set the subject to \"" + subject + "\"");
            emit(StepKind::EmailCreation, "compose the message body");
            emit(StepKind::EmailCreation, "send the email");
            for (const auto& name : string_list(element, "attachments")) {
                emit(StepKind::AttachmentAdd, "attach " + name);
            }
        } else if (kind == "file") {
            const std::string path = element.value("path", "");
            if (path.empty()) {
                throw SpecOpsError(ErrorCode::ConfigError, "plan element " + id + " has no path");
            }
            const std::string content = element.value("content", "");
            if (content.empty()) {
                emit(StepKind::FileTouchOrMkdir, "create empty file " + path);
            } else {
                emit(StepKind::FileCreateWithContent, "create " + path);
                emit(StepKind::FileCreateWithContent, "populate " + path);
            }
        } else if (kind == "mkdir") {
            const std::string path = element.value("path", "");
            if (path.empty()) {
                throw SpecOpsError(ErrorCode::ConfigError, "plan element " + id + " has no path");
            }
            emit(StepKind::FileTouchOrMkdir, "create directory " + path);
        } else if (kind == "terminal") {
            for (const auto& segment : split_command_chain(element.value("command", ""))) {
                emit(StepKind::TerminalCommand, "run `" + segment + "`");
            }
        } else if (kind == "navigation") {
            for (const auto& target : string_list(element, "transitions")) {
                emit(StepKind::Navigation, "navigate to " + target);
            }
        } else if (kind == "data_extraction") {
            for (const auto& item : string_list(element, "items")) {
                emit(StepKind::DataExtraction, "extract " + item);
            }
        } else if (kind == "natural_language") {
            for (const auto& statement : string_list(element, "statements")) {
                emit(StepKind::NaturalLanguage, statement);
            }
        } else {
            unclassified(id, "has unclassified kind '" + kind + "'");
        }
    }
    return steps;
}

Json StepAnnotation::to_json() const {
    Json j;
    j["step"] = step_id;
    if (phase) j["phase"] = step_phase_name(*phase);
    j["planned_correct"] = planned_correct;
    j["missing"] = missing;
    j["executed_ok"] = executed_ok;
    if (dependency) j["dependency"] = *dependency;
    return j;
}

StepAnnotation StepAnnotation::from_json(const Json& j) {
    StepAnnotation a;
    a.step_id = j.value("step", "");
    if (j.contains("phase")) a.phase = step_phase_from_name(j.at("phase").get<std::string>());
    a.planned_correct = j.value("planned_correct", true);
    a.missing = j.value("missing", false);
    a.executed_ok = j.value("executed_ok", true);
    if (j.contains("dependency")) a.dependency = j.at("dependency").get<std::string>();
    return a;
}

namespace {

std::vector<Json> parse_jsonl(const std::string& text) {
    std::vector<Json> objects;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j = try_parse_json(line);
        if (j.is_discarded() || !j.is_object()) {
            throw SpecOpsError(ErrorCode::InvalidAnnotation,
                               "annotation line " + std::to_string(number) + " is not a JSON object");
        }
        objects.push_back(std::move(j));
    }
    return objects;
}

} // namespace

std::vector<StepAnnotation> parse_step_annotations(const std::string& jsonl) {
    std::vector<StepAnnotation> out;
    for (const auto& j : parse_jsonl(jsonl)) out.push_back(StepAnnotation::from_json(j));
    return out;
}

std::optional<double> PhasePlanning::incorrect_pct() const {
    if (total == 0) return std::nullopt;
    return 100.0 * incorrect / total;
}

std::optional<double> PhaseExecution::success_pct() const {
    if (total == 0) return std::nullopt;
    return 100.0 * succeeded / total;
}

namespace {

Json pct_or_null(std::optional<double> pct) {
    if (!pct) return nullptr;
    return round_places(*pct, 1);
}

struct AnnotationIndex {
    std::map<std::string, const StepAnnotation*> by_step;
    std::vector<const StepAnnotation*> missing_entries;
};

AnnotationIndex index_annotations(const std::vector<DiscretizedStep>& steps,
                                  const std::vector<StepAnnotation>& annotations) {
    std::map<std::string, const DiscretizedStep*> known;
    for (const auto& s : steps) known[s.id] = &s;
    AnnotationIndex index;
    for (const auto& a : annotations) {
        if (a.missing) {
            if (!a.phase) {
                throw SpecOpsError(ErrorCode::InvalidAnnotation,
                                   "missing-step entry '" + a.step_id + "' has no phase");
            }
            if (known.count(a.step_id)) {
                throw SpecOpsError(ErrorCode::InvalidAnnotation,
                                   "entry '" + a.step_id + "' marked missing but the plan has it");
            }
            index.missing_entries.push_back(&a);
            continue;
        }
        if (!known.count(a.step_id)) {
            throw SpecOpsError(ErrorCode::InvalidAnnotation,
                               "annotation for unknown step '" + a.step_id + "'");
        }
        if (!index.by_step.emplace(a.step_id, &a).second) {
            throw SpecOpsError(ErrorCode::InvalidAnnotation,
                               "step '" + a.step_id + "' annotated twice");
        }
    }
    for (const auto& s : steps) {
        if (!index.by_step.count(s.id)) {
            throw SpecOpsError(ErrorCode::IncompleteAnnotation,
                               "step '" + s.id + "' is not annotated");
        }
    }
    return index;
}

} // namespace

Json PlanningScore::to_json() const {
    Json j;
    Json by_phase = Json::object();
    for (const auto& [phase, score] : phases) {
        Json p;
        p["total"] = score.total;
        p["incorrect"] = score.incorrect;
        p["incorrect_pct"] = pct_or_null(score.incorrect_pct());
        p["missing"] = score.missing;
        by_phase[step_phase_name(phase)] = std::move(p);
    }
    j["phases"] = std::move(by_phase);
    return j;
}

PlanningScore score_planning(const std::vector<DiscretizedStep>& steps,
                             const std::vector<StepAnnotation>& annotations) {
    const AnnotationIndex index = index_annotations(steps, annotations);
    PlanningScore score;
    for (StepPhase p : kAllStepPhases) score.phases[p] = {};
    for (const auto& s : steps) {
        PhasePlanning& phase = score.phases[s.phase];
        ++phase.total;
        if (!index.by_step.at(s.id)->planned_correct) ++phase.incorrect;
    }
    for (const StepAnnotation* a : index.missing_entries) {
        ++score.phases[*a->phase].missing;
    }
    return score;
}

Json ExecutionScore::to_json() const {
    Json j;
    Json by_phase = Json::object();
    for (const auto& [phase, score] : phases) {
        Json p;
        p["total"] = score.total;
        p["succeeded"] = score.succeeded;
        p["success_pct"] = pct_or_null(score.success_pct());
        p["display"] = format_ratio(score);
        by_phase[step_phase_name(phase)] = std::move(p);
    }
    j["phases"] = std::move(by_phase);
    j["corrections"] = corrections;
    return j;
}

ExecutionScore score_execution(const std::vector<DiscretizedStep>& steps,
                               const std::vector<StepAnnotation>& annotations) {
    const AnnotationIndex index = index_annotations(steps, annotations);

    enum class Visit { Untouched, InProgress, Done };
    std::map<std::string, Visit> visit;
    std::map<std::string, bool> effective;
    ExecutionScore score;
    for (StepPhase p : kAllStepPhases) score.phases[p] = {};

    std::function<bool(const std::string&)> eval = [&](const std::string& id) -> bool {
        if (visit[id] == Visit::Done) return effective[id];
        if (visit[id] == Visit::InProgress) {
            throw SpecOpsError(ErrorCode::InvalidAnnotation,
                               "dependency cycle through step '" + id + "'");
        }
        visit[id] = Visit::InProgress;
        const StepAnnotation* a = index.by_step.at(id);
        bool ok = a->executed_ok;
        if (a->dependency) {
            if (!index.by_step.count(*a->dependency)) {
                throw SpecOpsError(ErrorCode::InvalidAnnotation,
                                   "step '" + id + "' depends on unknown step '" + *a->dependency +
                                       "'");
            }
            const bool dep_ok = eval(*a->dependency);
            if (!dep_ok && ok) {
                ok = false;
                score.corrections.push_back("step '" + id + "' counted as failed: dependency '" +
                                            *a->dependency + "' failed");
            }
        }
        visit[id] = Visit::Done;
        effective[id] = ok;
        return ok;
    };

    for (const auto& s : steps) {
        PhaseExecution& phase = score.phases[s.phase];
        ++phase.total;
        if (eval(s.id)) ++phase.succeeded;
    }
    return score;
}

const char* bug_label_name(BugLabelKind k) {
    switch (k) {
        case BugLabelKind::TP: return "tp";
        case BugLabelKind::FP: return "fp";
        case BugLabelKind::FN: return "fn";
    }
    return "unknown";
}

BugLabelKind bug_label_from_name(const std::string& name) {
    for (BugLabelKind k : {BugLabelKind::TP, BugLabelKind::FP, BugLabelKind::FN}) {
        if (name == bug_label_name(k)) return k;
    }
    throw SpecOpsError(ErrorCode::InvalidAnnotation, "unknown bug label '" + name + "'");
}

Json BugLabel::to_json() const {
    Json j;
    j["report"] = report_id;
    j["label"] = bug_label_name(label);
    j["env_setup_caused"] = env_setup_caused;
    j["prompt_successful"] = prompt_successful;
    return j;
}

BugLabel BugLabel::from_json(const Json& j) {
    BugLabel b;
    b.report_id = j.value("report", "");
    b.label = bug_label_from_name(j.at("label").get<std::string>());
    b.env_setup_caused = j.value("env_setup_caused", false);
    b.prompt_successful = j.value("prompt_successful", true);
    return b;
}

std::vector<BugLabel> parse_bug_labels(const std::string& jsonl) {
    std::vector<BugLabel> out;
    for (const auto& j : parse_jsonl(jsonl)) out.push_back(BugLabel::from_json(j));
    return out;
}

double ConfusionMetrics::psr_pct() const {
    if (tests_total == 0) return 0.0;
    return 100.0 * tests_successful / tests_total;
}

std::optional<double> ConfusionMetrics::precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / (tp + fp);
}

std::optional<double> ConfusionMetrics::recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / (tp + fn);
}

std::optional<double> ConfusionMetrics::f1() const {
    const auto p = precision();
    const auto r = recall();
    if (!p || !r) return std::nullopt;
    if (*p + *r == 0.0) return 0.0;
    return 2.0 * *p * *r / (*p + *r);
}

namespace {

Json metric_or_null(std::optional<double> value) {
    if (!value) return nullptr;
    return round_places(*value, 2);
}

} // namespace

Json ConfusionMetrics::to_json() const {
    Json j;
    j["tp"] = tp;
    j["fp"] = fp;
    j["fn"] = fn;
    j["excluded_fps"] = excluded_fps;
    j["bugs_triggered"] = bugs_triggered();
    j["tests"] = tests_total;
    j["successful_prompts"] = tests_successful;
    j["psr_pct"] = round_places(psr_pct(), 1);
    j["precision"] = metric_or_null(precision());
    j["recall"] = metric_or_null(recall());
    j["f1"] = metric_or_null(f1());
    return j;
}

ConfusionMetrics bug_confusion(const std::vector<BugLabel>& labels, const TestCensus& tests) {
    if (tests.successful_prompts < 0 || tests.successful_prompts > tests.total) {
        throw SpecOpsError(ErrorCode::InvalidAnnotation, "prompt census out of range");
    }
    ConfusionMetrics m;
    m.tests_total = tests.total;
    m.tests_successful = tests.successful_prompts;
    for (const auto& label : labels) {
        if (label.env_setup_caused && label.label != BugLabelKind::FP) {
            throw SpecOpsError(ErrorCode::InvalidAnnotation,
                               "report '" + label.report_id +
                                   "': environment-caused reports must be labeled fp");
        }
        if (!label.prompt_successful && label.label != BugLabelKind::FP) {
            throw SpecOpsError(ErrorCode::InvalidAnnotation,
                               "report '" + label.report_id +
                                   "': unsuccessful-prompt reports must be labeled fp");
        }
        switch (label.label) {
            case BugLabelKind::TP: ++m.tp; break;
            case BugLabelKind::FN: ++m.fn; break;
            case BugLabelKind::FP:
                ++m.fp;
                if (!label.prompt_successful) ++m.excluded_fps;
                break;
        }
    }
    return m;
}

const char* hallucination_category_name(HallucinationCategory c) {
    switch (c) {
        case HallucinationCategory::InputConflicting: return "input_conflicting";
        case HallucinationCategory::Ui: return "ui";
        case HallucinationCategory::ApiTool: return "api_tool";
        case HallucinationCategory::Algorithmic: return "algorithmic";
        case HallucinationCategory::FalseValidation: return "false_validation";
        case HallucinationCategory::Miscellaneous: return "miscellaneous";
    }
    return "unknown";
}

HallucinationCategory hallucination_category_from_name(const std::string& name) {
    for (HallucinationCategory c : kAllHallucinationCategories) {
        if (name == hallucination_category_name(c)) return c;
    }
    throw SpecOpsError(ErrorCode::InvalidAnnotation, "unknown hallucination category '" + name + "'");
}

Json HallucinationTag::to_json() const {
    Json j;
    j["category"] = hallucination_category_name(category);
    j["ref"] = failure_ref;
    return j;
}

HallucinationTag HallucinationTag::from_json(const Json& j) {
    HallucinationTag t;
    t.category = hallucination_category_from_name(j.at("category").get<std::string>());
    t.failure_ref = j.value("ref", "");
    return t;
}

std::vector<HallucinationTag> parse_hallucination_tags(const std::string& jsonl) {
    std::vector<HallucinationTag> out;
    for (const auto& j : parse_jsonl(jsonl)) out.push_back(HallucinationTag::from_json(j));
    return out;
}

Json HallucinationReport::to_json() const {
    Json j;
    for (const auto& [category, count] : counts) {
        j[hallucination_category_name(category)] = count;
    }
    j["total"] = total;
    return j;
}

HallucinationReport hallucination_report(const std::vector<HallucinationTag>& tags) {
    HallucinationReport report;
    for (HallucinationCategory c : kAllHallucinationCategories) report.counts[c] = 0;
    for (const auto& tag : tags) {
        ++report.counts[tag.category];
        ++report.total;
    }
    return report;
}

double round_places(double value, int places) {
    const double factor = std::pow(10.0, places);
    return std::round(value * factor) / factor;
}

namespace {

std::string fixed(double value, int places) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", places, value);
    return buffer;
}

} // namespace

std::string format_pct(std::optional<double> pct) {
    if (!pct) return "--";
    return fixed(round_places(*pct, 1), 1) + "%";
}

std::string format_metric(std::optional<double> value) {
    if (!value) return "-";
    return fixed(round_places(*value, 2), 2);
}

std::string format_ratio(const PhaseExecution& p) {
    if (p.total == 0) return "--";
    return format_pct(p.success_pct()) + " (" + std::to_string(p.succeeded) + "/" +
           std::to_string(p.total) + ")";
}

namespace {

const char* phase_label(StepPhase p) {
    switch (p) {
        case StepPhase::Setup: return "Setup";
        case StepPhase::Execution: return "Execution";
        case StepPhase::Validation: return "Validation";
        case StepPhase::Cleanup: return "Cleanup";
    }
    return "?";
}

} // namespace

std::string render_table(const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
    }
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out += "  ";
            out += cells[c];
            out.append(widths[c] - cells[c].size(), ' ');
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    emit_row(headers);
    std::vector<std::string> rule;
    for (std::size_t w : widths) rule.push_back(std::string(w, '-'));
    emit_row(rule);
    for (const auto& row : rows) emit_row(row);
    return out;
}

namespace {

template <typename Score, typename Pred>
std::vector<StepPhase> active_phases(const std::vector<std::pair<std::string, Score>>& rows,
                                     Pred pred) {
    std::vector<StepPhase> active;
    for (StepPhase p : kAllStepPhases) {
        bool used = rows.empty();
        for (const auto& [name, score] : rows) {
            const auto it = score.phases.find(p);
            if (it != score.phases.end() && pred(it->second)) {
                used = true;
                break;
            }
        }
        if (used) active.push_back(p);
    }
    if (active.empty()) active.assign(std::begin(kAllStepPhases), std::end(kAllStepPhases));
    return active;
}

} // namespace

std::string render_planning_table(const std::vector<std::pair<std::string, PlanningScore>>& rows) {
    const auto phases = active_phases(
        rows, [](const PhasePlanning& p) { return p.total > 0 || p.missing > 0; });
    std::vector<std::string> headers{"suite"};
    for (StepPhase p : phases) {
        headers.push_back(std::string(phase_label(p)) + " inc");
        headers.push_back(std::string(phase_label(p)) + " inc%");
        headers.push_back(std::string(phase_label(p)) + " miss");
    }
    std::vector<std::vector<std::string>> body;
    for (const auto& [name, score] : rows) {
        std::vector<std::string> row{name};
        for (StepPhase p : phases) {
            const PhasePlanning& phase = score.phases.at(p);
            row.push_back(std::to_string(phase.incorrect));
            row.push_back(format_pct(phase.incorrect_pct()));
            row.push_back(std::to_string(phase.missing));
        }
        body.push_back(std::move(row));
    }
    return render_table(headers, body);
}

std::string render_execution_table(const std::vector<std::pair<std::string, ExecutionScore>>& rows) {
    const auto phases =
        active_phases(rows, [](const PhaseExecution& p) { return p.total > 0; });
    std::vector<std::string> headers{"suite"};
    for (StepPhase p : phases) headers.push_back(phase_label(p));
    std::vector<std::vector<std::string>> body;
    for (const auto& [name, score] : rows) {
        std::vector<std::string> row{name};
        for (StepPhase p : phases) row.push_back(format_ratio(score.phases.at(p)));
        body.push_back(std::move(row));
    }
    return render_table(headers, body);
}

std::string render_confusion_table(const std::vector<std::pair<std::string, ConfusionMetrics>>& rows) {
    const std::vector<std::string> headers{"suite", "triggered", "TP",     "FP", "FN",
                                           "excl",  "precision", "recall", "F1", "PSR"};
    std::vector<std::vector<std::string>> body;
    for (const auto& [name, m] : rows) {
        body.push_back({name, std::to_string(m.bugs_triggered()), std::to_string(m.tp),
                        std::to_string(m.fp), std::to_string(m.fn), std::to_string(m.excluded_fps),
                        format_metric(m.precision()), format_metric(m.recall()),
                        format_metric(m.f1()), format_pct(m.psr_pct())});
    }
    return render_table(headers, body);
}

std::string render_hallucination_table(
    const std::vector<std::pair<std::string, HallucinationReport>>& rows) {
    std::vector<std::string> headers{"suite"};
    for (HallucinationCategory c : kAllHallucinationCategories) {
        headers.push_back(hallucination_category_name(c));
    }
    headers.push_back("total");
    std::vector<std::vector<std::string>> body;
    for (const auto& [name, report] : rows) {
        std::vector<std::string> row{name};
        for (HallucinationCategory c : kAllHallucinationCategories) {
            row.push_back(std::to_string(report.counts.at(c)));
        }
        row.push_back(std::to_string(report.total));
        body.push_back(std::move(row));
    }
    return render_table(headers, body);
}

} // namespace specops::metrics
