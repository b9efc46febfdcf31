#include "specops/pipeline.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "specops/errors.hpp"
#include "specops/registries.hpp"
#include "specops/ui_toolkit.hpp"

namespace fs = std::filesystem;

namespace specops::pipeline {

const char* bug_criterion_name(BugCriterion c) {
    switch (c) {
        case BugCriterion::DeviationFromExpected: return "deviation_from_expected";
        case BugCriterion::Misreporting: return "misreporting";
        case BugCriterion::CompletionImpact: return "completion_impact";
        case BugCriterion::QualityImpact: return "quality_impact";
        case BugCriterion::UnreasonableIntervention: return "unreasonable_intervention";
    }
    return "unknown";
}

BugCriterion bug_criterion_from_name(const std::string& name) {
    for (BugCriterion c : kAllBugCriteria) {
        if (name == bug_criterion_name(c)) return c;
    }
    throw SpecOpsError(ErrorCode::ConfigError, "unknown bug criterion '" + name + "'");
}

const char* run_outcome_name(RunOutcome o) {
    switch (o) {
        case RunOutcome::Pass: return "pass";
        case RunOutcome::BugsFound: return "bugs_found";
        case RunOutcome::EnvironmentFailure: return "environment_failure";
    }
    return "unknown";
}

RunOutcome run_outcome_from_name(const std::string& name) {
    for (RunOutcome o : {RunOutcome::Pass, RunOutcome::BugsFound, RunOutcome::EnvironmentFailure}) {
        if (name == run_outcome_name(o)) return o;
    }
    throw SpecOpsError(ErrorCode::ConfigError, "unknown run outcome '" + name + "'");
}

Json BugEvidence::to_json() const {
    Json j;
    j["captures"] = capture_seqs;
    j["diff_entries"] = diff_entries;
    j["findings"] = finding_ids;
    return j;
}

BugEvidence BugEvidence::from_json(const Json& j) {
    BugEvidence e;
    if (j.contains("captures")) e.capture_seqs = j.at("captures").get<std::vector<int>>();
    if (j.contains("diff_entries")) {
        e.diff_entries = j.at("diff_entries").get<std::vector<std::string>>();
    }
    if (j.contains("findings")) e.finding_ids = j.at("findings").get<std::vector<std::string>>();
    return e;
}

Json BugReport::to_json() const {
    Json j;
    j["criterion"] = bug_criterion_name(criterion);
    j["description"] = description;
    j["evidence"] = evidence.to_json();
    j["questions"] = question_refs;
    return j;
}

BugReport BugReport::from_json(const Json& j) {
    BugReport b;
    b.criterion = bug_criterion_from_name(j.at("criterion").get<std::string>());
    b.description = j.at("description").get<std::string>();
    b.evidence = BugEvidence::from_json(j.value("evidence", Json::object()));
    if (j.contains("questions")) b.question_refs = j.at("questions").get<std::vector<int>>();
    return b;
}

Json Verdict::to_json() const {
    Json j;
    j["outcome"] = run_outcome_name(outcome);
    if (!environment_fault.empty()) j["environment_fault"] = environment_fault;
    j["bugs"] = Json::array();
    for (const auto& b : bugs) j["bugs"].push_back(b.to_json());
    j["questions"] = Json::array();
    for (const auto& q : questions) {
        j["questions"].push_back(Json{{"criterion", bug_criterion_name(q.criterion)}, {"text", q.text}});
    }
    j["answers"] = Json::array();
    for (const auto& a : answers) {
        j["answers"].push_back(Json{{"question", a.question}, {"text", a.text}});
    }
    j["summary"] = summary;
    return j;
}

Verdict Verdict::from_json(const Json& j) {
    Verdict v;
    v.outcome = run_outcome_from_name(j.at("outcome").get<std::string>());
    v.environment_fault = j.value("environment_fault", "");
    for (const auto& b : j.value("bugs", Json::array())) v.bugs.push_back(BugReport::from_json(b));
    for (const auto& q : j.value("questions", Json::array())) {
        v.questions.push_back({bug_criterion_from_name(q.at("criterion").get<std::string>()),
                               q.at("text").get<std::string>()});
    }
    for (const auto& a : j.value("answers", Json::array())) {
        v.answers.push_back({a.at("question").get<int>(), a.at("text").get<std::string>()});
    }
    v.summary = j.value("summary", "");
    return v;
}

Json PhaseRecord::to_json() const {
    Json j;
    j["phase"] = phase_name(phase);
    j["status"] = status;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["detail"] = detail;
    return j;
}

namespace {

Json feature_to_json(const spec::FeatureDescription& f) {
    Json j;
    j["id"] = f.id;
    j["domain"] = spec::domain_name(f.domain);
    j["text"] = f.text;
    return j;
}

spec::FeatureDescription feature_from_json(const Json& j) {
    spec::FeatureDescription f;
    f.id = j.at("id").get<std::string>();
    f.domain = spec::domain_from_name(j.value("domain", "Other"));
    f.text = j.at("text").get<std::string>();
    return f;
}

Json agent_to_json(const spec::AgentSpecification& a) {
    Json j;
    j["name"] = a.name;
    j["platform"] = spec::platform_name(a.platform);
    j["launch"] = a.launch;
    j["docs"] = a.docs;
    return j;
}

spec::AgentSpecification agent_from_json(const Json& j) {
    spec::AgentSpecification a;
    a.name = j.at("name").get<std::string>();
    a.platform = spec::platform_from_name(j.value("platform", "Cli"));
    if (j.contains("launch")) a.launch = j.at("launch").get<std::vector<std::string>>();
    a.docs = j.value("docs", "");
    return a;
}

} // namespace

Json RunConfig::to_json() const {
    Json j;
    j["feature"] = feature_to_json(feature);
    j["agent"] = agent_to_json(agent);
    j["script"] = script.to_json();
    j["transcript"] = transcript;
    j["faults"] = Json::array();
    for (const auto& f : faults) {
        j["faults"].push_back(Json{{"kind", env::fault_name(f.kind)}, {"count", f.count}});
    }
    j["max_retries"] = max_retries;
    j["max_analyst_rounds"] = max_analyst_rounds;
    j["quiesce_seconds"] = quiesce_seconds;
    j["max_wait_seconds"] = max_wait_seconds;
    j["start_epoch"] = start_epoch;
    return j;
}

RunConfig RunConfig::from_json(const Json& j, const fs::path& base_dir) {
    RunConfig c;
    c.feature = feature_from_json(j.at("feature"));
    c.agent = agent_from_json(j.at("agent"));
    if (j.contains("script")) {
        c.script = mocks::BehaviorScript::from_json(j.at("script"));
    } else if (j.contains("script_path")) {
        c.script = mocks::BehaviorScript::from_json(
            load_json_file(base_dir / j.at("script_path").get<std::string>()));
    } else {
        throw SpecOpsError(ErrorCode::ConfigError, "config needs script or script_path");
    }
    if (j.contains("transcript")) {
        c.transcript = j.at("transcript");
    } else if (j.contains("transcript_path")) {
        c.transcript = load_json_file(base_dir / j.at("transcript_path").get<std::string>());
    } else {
        throw SpecOpsError(ErrorCode::ConfigError, "config needs transcript or transcript_path");
    }
    for (const auto& f : j.value("faults", Json::array())) {
        c.faults.push_back(
            {env::fault_from_name(f.at("kind").get<std::string>()), f.value("count", -1)});
    }
    c.max_retries = j.value("max_retries", 3);
    c.max_analyst_rounds = j.value("max_analyst_rounds", 3);
    c.quiesce_seconds = j.value("quiesce_seconds", 10);
    c.max_wait_seconds = j.value("max_wait_seconds", 120);
    c.start_epoch = j.value("start_epoch", LogicalClock::kDefaultEpoch);
    return c;
}

namespace {

constexpr int kMaxSetupTurns = 8;
constexpr int kMaxExecutionTurns = 12;
constexpr int kMaxInvestigationTurns = 8;

const char* system_prompt_for(SpecialistRole role) {
    switch (role) {
        case SpecialistRole::TestArchitect:
            return "You are the test architect. Draft the bundled test specification for the "
                   "feature under test: setup steps, the subject prompt, and validation oracles. "
                   "Reply with one JSON object {setup_steps, prompt, oracles}.";
        case SpecialistRole::TestAnalyst:
            return "You are the test analyst. Review the specification snapshot for missing or "
                   "incoherent data. Reply {\"action\":\"approve\"} or "
                   "{\"action\":\"revise\",\"delta\":{...}}.";
        case SpecialistRole::InfrastructureManager:
            return "You are the infrastructure manager. Prepare the environment the setup steps "
                   "describe using your tools, verify it, then reply {\"action\":\"done\"}.";
        case SpecialistRole::Engineer:
            return "You are the test engineer. Drive the agent under test through its own "
                   "interface, adapt to tool feedback, and reply {\"action\":\"done\"} when the "
                   "agent has finished.";
        case SpecialistRole::Investigator:
            return "You are the investigator. Check the oracle conditions against the live "
                   "environment with your tools and reply "
                   "{\"action\":\"report\",\"findings\":[...]}.";
        case SpecialistRole::Judge:
            return "You are the judge. First ask verification questions covering every bug "
                   "criterion; then answer them from the recorded evidence only and deliver the "
                   "verdict.";
    }
    return "";
}

struct Chat {
    SpecialistRole role;
    const tools::Registry* registry = nullptr;
    std::vector<llm::Message> history;
};

Json parse_object(const std::string& content, const char* who) {
    Json j = try_parse_json(content);
    if (j.is_discarded() || !j.is_object()) {
        throw SpecOpsError(ErrorCode::ProtocolViolation,
                           std::string(who) + " reply is not a JSON object");
    }
    return j;
}

std::optional<std::string> action_of(const std::string& content) {
    Json j = try_parse_json(content);
    if (j.is_discarded() || !j.is_object() || !j.contains("action")) return std::nullopt;
    return j.at("action").get<std::string>();
}

class Runner {
public:
    Runner(const RunConfig& config, fs::path work_root)
        : config_(config),
          work_root_(std::move(work_root)),
          clock_(std::make_shared<LogicalClock>(config.start_epoch)),
          environment_(work_root_ / "home", clock_),
          gateway_(std::make_shared<llm::ScriptedProvider>(config.transcript)) {
        for (const auto& plan : config_.faults) {
            environment_.faults().arm(plan.kind, plan.count);
        }
    }

    RunResult run() {
        phase_generation();
        const bool environment_ok = phase_setup();
        if (environment_ok) {
            phase_execution();
            phase_validation();
        } else {
            skip_phase(Phase::Execution, "environment failure during setup");
            skip_phase(Phase::Validation, "environment failure during setup");
        }
        return assemble();
    }

private:
    // -- conversation helpers -------------------------------------------------

    llm::CompletionResponse send(Chat& chat) {
        llm::CompletionRequest request;
        request.role = chat.role;
        request.system_prompt = system_prompt_for(chat.role);
        request.messages = chat.history;
        if (chat.registry) request.available_tools = chat.registry->tools();
        llm::CompletionResponse response = gateway_.complete(request);
        chat.history.push_back({llm::MessageAuthor::Assistant, response.content, std::nullopt});
        clock_->advance(1);
        return response;
    }

    llm::CompletionResponse step_user(Chat& chat, std::string text) {
        chat.history.push_back({llm::MessageAuthor::User, std::move(text), std::nullopt});
        return send(chat);
    }

    llm::CompletionResponse step_tools(Chat& chat, const std::vector<tools::ToolResult>& results) {
        for (const auto& r : results) {
            chat.history.push_back({llm::MessageAuthor::ToolResult, r.to_json().dump(), std::nullopt});
        }
        return send(chat);
    }

    // -- phase bookkeeping ----------------------------------------------------

    PhaseRecord& open_phase(Phase phase) {
        PhaseRecord rec;
        rec.phase = phase;
        rec.started_at = clock_->now();
        gateway_.set_phase(phase);
        phases_.push_back(rec);
        return phases_.back();
    }

    void close_phase(PhaseRecord& rec, const std::string& status, const std::string& detail) {
        rec.finished_at = clock_->now();
        rec.status = status;
        rec.detail = detail;
        gateway_.ledger().record_phase_seconds(rec.phase, rec.finished_at - rec.started_at);
    }

    void skip_phase(Phase phase, const std::string& why) {
        PhaseRecord rec;
        rec.phase = phase;
        rec.started_at = clock_->now();
        rec.finished_at = clock_->now();
        rec.status = "skipped";
        rec.detail = why;
        phases_.push_back(rec);
        gateway_.ledger().record_phase_seconds(phase, 0);
    }

    // -- phase 1: generation --------------------------------------------------

    std::vector<spec::CoherenceViolation> open_violations() const {
        return spec::coherence_check(specification_);
    }

    void phase_generation() {
        PhaseRecord& rec = open_phase(Phase::Generation);
        specification_ = spec::new_specification(config_.feature, config_.agent, clock_->now());

        Chat architect{SpecialistRole::TestArchitect, nullptr, {}};
        llm::CompletionResponse draft_resp = step_user(
            architect, "Feature under test:\n" + feature_to_json(config_.feature).dump(2) +
                           "\nAgent under test:\n" + agent_to_json(config_.agent).dump(2) +
                           "\nDraft the bundled test specification.");
        Json draft = parse_object(draft_resp.content, "test architect");
        Json delta_json;
        delta_json["description"] = "initial draft";
        delta_json["add_setup_steps"] = draft.value("setup_steps", Json::array());
        if (draft.contains("prompt")) delta_json["set_prompt"] = draft.at("prompt");
        delta_json["add_oracles"] = draft.value("oracles", Json::array());
        specification_ = spec::revise_specification(
            specification_, SpecialistRole::TestArchitect,
            spec::RevisionDelta::from_json(delta_json), clock_->now());

        Chat analyst{SpecialistRole::TestAnalyst, nullptr, {}};
        bool approved = false;
        for (int round = 0; round < config_.max_analyst_rounds && !approved; ++round) {
            const auto violations = open_violations();
            Json violations_json = Json::array();
            for (const auto& v : violations) {
                violations_json.push_back(Json{{"kind", spec::violation_kind_name(v.kind)},
                                               {"subject", v.subject},
                                               {"detail", v.detail}});
            }
            llm::CompletionResponse resp = step_user(
                analyst, "Specification snapshot " + specification_.active_snapshot_id() + ":\n" +
                             specification_.active_json().dump(2) + "\nCoherence findings:\n" +
                             violations_json.dump(2));
            Json reply = parse_object(resp.content, "test analyst");
            const std::string action = reply.value("action", "");
            if (action == "approve") {
                approved = violations.empty();
            } else if (action == "revise") {
                specification_ = spec::revise_specification(
                    specification_, SpecialistRole::TestAnalyst,
                    spec::RevisionDelta::from_json(reply.at("delta")), clock_->now());
                approved = open_violations().empty();
            } else {
                throw SpecOpsError(ErrorCode::ProtocolViolation,
                                   "test analyst action '" + action + "' is not approve/revise");
            }
        }
        if (!approved) {
            throw SpecOpsError(ErrorCode::GenerationIncoherent,
                               "specification still incoherent after " +
                                   std::to_string(config_.max_analyst_rounds) + " analyst rounds");
        }
        close_phase(rec, "completed",
                    "specification " + specification_.active_snapshot_id() + " approved with " +
                        std::to_string(specification_.active().setup_steps.size()) +
                        " setup steps and " +
                        std::to_string(specification_.active().oracles.size()) + " oracles");
    }

    // -- phase 2: setup -------------------------------------------------------

    bool phase_setup() {
        PhaseRecord& rec = open_phase(Phase::Setup);
        tools::Registry registry =
            registries::make_registry(SpecialistRole::InfrastructureManager, environment_, nullptr,
                                      config_.agent.platform);
        Chat chat{SpecialistRole::InfrastructureManager, &registry, {}};
        setup_report_["actions"] = Json::array();

        llm::CompletionResponse resp =
            step_user(chat, "Prepare the environment for snapshot " +
                                specification_.active_snapshot_id() + ".\nSetup steps:\n" +
                                specification_.active_json().dump(2));
        for (int turn = 0; turn < kMaxSetupTurns; ++turn) {
            std::vector<tools::ToolResult> results;
            for (const auto& call : resp.tool_calls) {
                tools::RetriedResult retried = tools::retry_loop(registry, call, config_.max_retries);
                clock_->advance(1);
                Json action;
                action["tool"] = call.tool;
                action["args"] = call.args;
                action["status"] = tools::tool_status_name(retried.result.status);
                action["attempts"] = retried.attempts;
                action["observation"] = retried.result.observation;
                if (retried.result.payload.contains("fault")) {
                    action["fault"] = retried.result.payload.at("fault");
                }
                setup_report_["actions"].push_back(action);
                if (retried.result.status == tools::ToolStatus::FatalError) {
                    if (retried.result.fatal_kind == tools::FatalKind::RetriesExhausted) {
                        abort_for_environment(rec, retried);
                        return false;
                    }
                    throw SpecOpsError(ErrorCode::ProtocolViolation,
                                       "setup tool '" + call.tool +
                                           "' failed: " + retried.result.observation);
                }
                results.push_back(retried.result);
            }
            const auto action = action_of(resp.content);
            if (action == "done") {
                setup_report_["outcome"] = "completed";
                environment_before_ = environment_.snapshot();
                close_phase(rec, "completed",
                            std::to_string(setup_report_["actions"].size()) + " setup actions");
                return true;
            }
            if (action == "revise") {
                Json reply = parse_object(resp.content, "infrastructure manager");
                specification_ = spec::revise_specification(
                    specification_, SpecialistRole::InfrastructureManager,
                    spec::RevisionDelta::from_json(reply.at("delta")), clock_->now());
                resp = step_user(chat, "Revision applied. Snapshot " +
                                           specification_.active_snapshot_id() + ":\n" +
                                           specification_.active_json().dump(2));
                continue;
            }
            if (!results.empty()) {
                resp = step_tools(chat, results);
                continue;
            }
            throw SpecOpsError(ErrorCode::ProtocolViolation,
                               "infrastructure manager made no progress (no tools, no done)");
        }
        throw SpecOpsError(ErrorCode::ProtocolViolation, "setup did not converge");
    }

    void abort_for_environment(PhaseRecord& rec, const tools::RetriedResult& retried) {
        std::string fault = "environment";
        if (retried.result.payload.contains("fault")) {
            fault = retried.result.payload.at("fault").get<std::string>();
        }
        setup_report_["outcome"] = "environment_failure";
        setup_report_["fault"] = fault;
        verdict_.outcome = RunOutcome::EnvironmentFailure;
        verdict_.environment_fault = fault;
        verdict_.summary = "environment failure during setup: " + retried.result.observation;
        close_phase(rec, "aborted", "environment failure (" + fault + ")");
    }

    // -- phase 3: execution ---------------------------------------------------

    void phase_execution() {
        PhaseRecord& rec = open_phase(Phase::Execution);
        session_ = std::make_unique<registries::SubjectSession>(
            environment_, config_.script, config_.quiesce_seconds, config_.max_wait_seconds);
        tools::Registry registry = registries::make_registry(
            SpecialistRole::Engineer, environment_, session_.get(), config_.agent.platform);
        Chat chat{SpecialistRole::Engineer, &registry, {}};

        llm::CompletionResponse resp = step_user(
            chat, "Deliver the subject prompt to " + config_.agent.name + " (" +
                      spec::platform_name(config_.agent.platform) + ") and watch it work.\n"
                      "Subject prompt:\n" + specification_.active().subject_prompt);
        bool done = false;
        for (int turn = 0; turn < kMaxExecutionTurns && !done; ++turn) {
            std::vector<tools::ToolResult> results;
            for (const auto& call : resp.tool_calls) {
                // no blind retry here: the engineer reads the feedback and adapts
                tools::ToolResult result = tools::dispatch(registry, call);
                clock_->advance(1);
                if (call.tool == "wait_for_completion" && result.ok()) {
                    wait_outcome_ = result.payload;
                }
                results.push_back(std::move(result));
            }
            if (action_of(resp.content) == "done") {
                done = true;
                break;
            }
            if (results.empty()) {
                throw SpecOpsError(ErrorCode::ProtocolViolation,
                                   "engineer made no progress (no tools, no done)");
            }
            resp = step_tools(chat, results);
        }
        if (!done) {
            throw SpecOpsError(ErrorCode::ProtocolViolation, "execution did not converge");
        }
        if (session_->launched()) {
            session_->screen().capture_now(ui::CaptureTrigger::PhaseBoundary);
            session_->screen().close_session();
        }
        prompt_delivered_ = session_->prompt_delivered();
        environment_after_ = environment_.snapshot();
        environment_diff_ = env::diff_snapshots(environment_before_, environment_after_);
        close_phase(rec, "completed",
                    prompt_delivered_ ? "prompt delivered and observed"
                                      : "prompt was never verifiably delivered");
    }

    // -- phase 4: validation --------------------------------------------------

    bool needs_investigator() const {
        if (!environment_diff_.empty()) return true;
        const auto& oracles = specification_.active().oracles;
        return std::any_of(oracles.begin(), oracles.end(), [](const spec::Oracle& o) {
            return o.check_kind == spec::CheckKind::EnvProbe;
        });
    }

    bool run_investigator(PhaseRecord& rec) {
        tools::Registry registry = registries::make_registry(
            SpecialistRole::Investigator, environment_, nullptr, config_.agent.platform);
        Chat chat{SpecialistRole::Investigator, &registry, {}};
        Json oracles = specification_.active_json().value("oracles", Json::array());
        llm::CompletionResponse resp = step_user(
            chat, "Verify the oracle conditions against the environment.\nOracles:\n" +
                      oracles.dump(2) + "\nObserved environment diff:\n" +
                      environment_diff_.to_json().dump(2));
        for (int turn = 0; turn < kMaxInvestigationTurns; ++turn) {
            std::vector<tools::ToolResult> results;
            for (const auto& call : resp.tool_calls) {
                tools::RetriedResult retried = tools::retry_loop(registry, call, config_.max_retries);
                clock_->advance(1);
                if (retried.result.status == tools::ToolStatus::FatalError) {
                    if (retried.result.fatal_kind == tools::FatalKind::RetriesExhausted) {
                        abort_for_environment(rec, retried);
                        return false;
                    }
                    throw SpecOpsError(ErrorCode::ProtocolViolation,
                                       "investigator tool '" + call.tool +
                                           "' failed: " + retried.result.observation);
                }
                results.push_back(retried.result);
            }
            if (action_of(resp.content) == "report") {
                Json reply = parse_object(resp.content, "investigator");
                for (const auto& f : reply.value("findings", Json::array())) {
                    Json finding;
                    finding["id"] = "f" + std::to_string(findings_.size() + 1);
                    finding["statement"] = f.at("statement").get<std::string>();
                    finding["keys"] = f.value("keys", Json::array());
                    findings_.push_back(std::move(finding));
                }
                return true;
            }
            if (results.empty()) {
                throw SpecOpsError(ErrorCode::ProtocolViolation,
                                   "investigator made no progress (no tools, no report)");
            }
            resp = step_tools(chat, results);
        }
        throw SpecOpsError(ErrorCode::ProtocolViolation, "investigation did not converge");
    }

    Json judge_bundle() const {
        Json bundle;
        bundle["subject_prompt"] = specification_.active().subject_prompt;
        bundle["oracles"] = specification_.active_json().value("oracles", Json::array());
        bundle["prompt_delivered"] = prompt_delivered_;
        bundle["unsuccessful_prompt"] = !prompt_delivered_;
        bundle["env_diff"] = environment_diff_.to_json();
        bundle["findings"] = findings_;
        Json captures = Json::array();
        if (session_) {
            for (const auto& cap : session_->screen().captures()) {
                captures.push_back(Json{{"seq", cap.seq},
                                        {"trigger", ui::capture_trigger_name(cap.trigger)},
                                        {"timestamp", cap.timestamp}});
            }
        }
        bundle["captures"] = std::move(captures);
        bundle["final_screen"] = final_screen_text();
        return bundle;
    }

    std::string final_screen_text() const {
        if (!session_) return "";
        const ui::Frame& f = session_->screen().frame();
        std::string text;
        for (int r = 0; r < f.rows(); ++r) {
            std::string row = f.row(r);
            const std::size_t end = row.find_last_not_of(' ');
            row = end == std::string::npos ? "" : row.substr(0, end + 1);
            if (r > 0) text.push_back('\n');
            text += row;
        }
        return text;
    }

    void validate_bug(const BugReport& bug) const {
        if (bug.evidence.empty()) {
            throw SpecOpsError(ErrorCode::ProtocolViolation,
                               "bug report without evidence references");
        }
        if (bug.question_refs.empty()) {
            throw SpecOpsError(ErrorCode::ProtocolViolation,
                               "bug report cites no verification question");
        }
        const int capture_count =
            session_ ? static_cast<int>(session_->screen().captures().size()) : 0;
        for (int seq : bug.evidence.capture_seqs) {
            if (seq < 0 || seq >= capture_count) {
                throw SpecOpsError(ErrorCode::ProtocolViolation,
                                   "bug cites unknown capture " + std::to_string(seq));
            }
        }
        for (const auto& entry : bug.evidence.diff_entries) {
            if (entry.rfind("absent:", 0) == 0) {
                const std::string key = entry.substr(7);
                if (environment_after_.entries.count(key) || environment_diff_.mentions(key)) {
                    throw SpecOpsError(ErrorCode::ProtocolViolation,
                                       "bug claims '" + key + "' absent but it exists");
                }
            } else if (!environment_diff_.mentions(entry)) {
                throw SpecOpsError(ErrorCode::ProtocolViolation,
                                   "bug cites '" + entry + "' which is not in the diff");
            }
        }
        for (const auto& id : bug.evidence.finding_ids) {
            const bool known = std::any_of(findings_.begin(), findings_.end(), [&](const Json& f) {
                return f.at("id").get<std::string>() == id;
            });
            if (!known) {
                throw SpecOpsError(ErrorCode::ProtocolViolation, "bug cites unknown finding " + id);
            }
        }
        for (int q : bug.question_refs) {
            if (q < 0 || q >= static_cast<int>(verdict_.questions.size())) {
                throw SpecOpsError(ErrorCode::ProtocolViolation,
                                   "bug cites unknown question " + std::to_string(q));
            }
        }
    }

    void phase_validation() {
        PhaseRecord& rec = open_phase(Phase::Validation);
        investigator_deployed_ = needs_investigator();
        if (investigator_deployed_ && !run_investigator(rec)) {
            return; // environment failure already recorded
        }

        Chat judge{SpecialistRole::Judge, nullptr, {}};
        llm::CompletionResponse q_resp = step_user(
            judge, "Evidence record:\n" + judge_bundle().dump(2) +
                       "\nAsk verification questions covering every bug criterion.");
        Json q_reply = parse_object(q_resp.content, "judge");
        std::set<BugCriterion> covered;
        for (const auto& q : q_reply.value("questions", Json::array())) {
            JudgeQuestion question;
            question.criterion = bug_criterion_from_name(q.at("criterion").get<std::string>());
            question.text = q.at("text").get<std::string>();
            covered.insert(question.criterion);
            verdict_.questions.push_back(std::move(question));
        }
        if (covered.size() != std::size(kAllBugCriteria)) {
            throw SpecOpsError(ErrorCode::ProtocolViolation,
                               "judge questions do not cover all five bug criteria");
        }

        llm::CompletionResponse v_resp = step_user(
            judge, "Answer each question strictly from the recorded evidence, then deliver the "
                   "verdict object.");
        Json v_reply = parse_object(v_resp.content, "judge");
        std::set<int> answered;
        for (const auto& a : v_reply.value("answers", Json::array())) {
            JudgeAnswer answer;
            answer.question = a.at("question").get<int>();
            answer.text = a.at("text").get<std::string>();
            if (answer.question < 0 ||
                answer.question >= static_cast<int>(verdict_.questions.size())) {
                throw SpecOpsError(ErrorCode::ProtocolViolation, "answer to unknown question");
            }
            answered.insert(answer.question);
            verdict_.answers.push_back(std::move(answer));
        }
        if (answered.size() != verdict_.questions.size()) {
            throw SpecOpsError(ErrorCode::ProtocolViolation,
                               "judge left verification questions unanswered");
        }

        const Json verdict_json = v_reply.value("verdict", Json::object());
        const std::string outcome = verdict_json.value("outcome", "");
        for (const auto& b : verdict_json.value("bugs", Json::array())) {
            BugReport bug = BugReport::from_json(b);
            validate_bug(bug);
            verdict_.bugs.push_back(std::move(bug));
        }
        if (outcome == "pass") {
            if (!verdict_.bugs.empty()) {
                throw SpecOpsError(ErrorCode::ProtocolViolation, "pass verdict lists bugs");
            }
            verdict_.outcome = RunOutcome::Pass;
        } else if (outcome == "bugs") {
            if (verdict_.bugs.empty()) {
                throw SpecOpsError(ErrorCode::ProtocolViolation, "bug verdict lists no bugs");
            }
            verdict_.outcome = RunOutcome::BugsFound;
        } else {
            throw SpecOpsError(ErrorCode::ProtocolViolation,
                               "judge outcome '" + outcome + "' is not pass/bugs");
        }
        verdict_.summary = verdict_json.value("summary", "");
        close_phase(rec, "completed",
                    verdict_.bugs.empty()
                        ? "pass"
                        : std::to_string(verdict_.bugs.size()) + " bug report(s)");
    }

    // -- record assembly ------------------------------------------------------

    RunResult assemble() {
        RunResult result;
        result.verdict = verdict_;
        result.specification = specification_;
        result.phases = phases_;
        result.setup_report = setup_report_;
        result.ledger = gateway_.ledger().to_json();

        Json evidence;
        evidence["prompt_delivered"] = prompt_delivered_;
        evidence["unsuccessful_prompt"] = session_ ? !prompt_delivered_ : false;
        evidence["type_attempts"] = session_ ? session_->type_attempts() : 0;
        evidence["wait"] = wait_outcome_;
        evidence["env_diff"] = environment_diff_.to_json();
        evidence["findings"] = findings_;
        evidence["investigator_deployed"] = investigator_deployed_;
        evidence["capture_count"] =
            session_ ? static_cast<int>(session_->screen().captures().size()) : 0;
        result.evidence = std::move(evidence);

        const fs::path record_dir = work_root_ / "record";
        std::error_code ec;
        fs::create_directories(record_dir, ec);
        if (ec) {
            throw SpecOpsError(ErrorCode::IoError, "cannot create " + record_dir.string());
        }
        save_json_file(record_dir / "spec.json", specification_.to_json());
        Json phases = Json::array();
        for (const auto& p : phases_) phases.push_back(p.to_json());
        save_json_file(record_dir / "phases.json", phases);
        save_json_file(record_dir / "setup_report.json", setup_report_);
        save_json_file(record_dir / "evidence.json", result.evidence);
        save_json_file(record_dir / "verdict.json", verdict_.to_json());
        save_json_file(record_dir / "ledger.json", result.ledger);
        ui::save_captures(record_dir / "captures",
                          session_ ? session_->screen().captures()
                                   : std::vector<ui::ScreenCapture>{});
        result.record_dir = record_dir;
        return result;
    }

    RunConfig config_;
    fs::path work_root_;
    std::shared_ptr<LogicalClock> clock_;
    env::TestEnvironment environment_;
    llm::Gateway gateway_;
    std::unique_ptr<registries::SubjectSession> session_;

    spec::TestSpecification specification_;
    std::vector<PhaseRecord> phases_;
    Json setup_report_ = Json::object();
    Json findings_ = Json::array();
    Json wait_outcome_;
    env::EnvSnapshot environment_before_;
    env::EnvSnapshot environment_after_;
    env::EnvDiff environment_diff_;
    bool prompt_delivered_ = false;
    bool investigator_deployed_ = false;
    Verdict verdict_;
};

} // namespace

RunResult run_test(const RunConfig& config, const fs::path& work_root) {
    Runner runner(config, work_root);
    return runner.run();
}

} // namespace specops::pipeline
