#include "specops/registries.hpp"

#include <algorithm>
#include <cctype>

#include "specops/errors.hpp"

namespace specops::registries {

using tools::ParamType;
using tools::Registry;
using tools::ToolCall;
using tools::ToolOutcome;
using tools::ToolSignature;

SubjectSession::SubjectSession(env::TestEnvironment& env, mocks::BehaviorScript script,
                               int quiesce_seconds, int max_wait_seconds)
    : env_(env),
      script_(std::move(script)),
      screen_(std::make_shared<ui::VirtualTerminal>(env.clock_ptr())),
      quiesce_seconds_(quiesce_seconds),
      max_wait_seconds_(max_wait_seconds) {
    if (quiesce_seconds_ < 1 || max_wait_seconds_ < quiesce_seconds_) {
        throw SpecOpsError(ErrorCode::ConfigError, "invalid wait configuration");
    }
}

std::string SubjectSession::launch() {
    if (subject_) {
        throw SpecOpsError(ErrorCode::SpawnError, "subject is already running");
    }
    screen_->open_session();
    subject_ = mocks::spawn_subject(script_, env_, screen_);
    return "launched " + script_.agent_name + " (" + script_.ui + " ui); screen attached";
}

ui::VirtualTerminal& SubjectSession::screen() { return *screen_; }

mocks::MockSubject& SubjectSession::subject() {
    if (!subject_) {
        throw SpecOpsError(ErrorCode::SessionClosed, "no subject is running");
    }
    return *subject_;
}

ui::TypeResult SubjectSession::type_text(const std::string& text) {
    ++type_attempts_;
    ui::TypeResult r = ui::type_verified(*screen_, text);
    if (r.ok()) last_ok_type_seq_ = screen_->last_capture_seq();
    return r;
}

void SubjectSession::press_enter() { screen_->send_keys("\n"); }

SubjectSession::WaitOutcome SubjectSession::wait_for_completion(int max_seconds) {
    WaitOutcome outcome;
    if (!subject_) {
        throw SpecOpsError(ErrorCode::SessionClosed, "no subject is running");
    }
    const int budget = max_seconds > 0 ? max_seconds : max_wait_seconds_;
    int quiet = 0;
    while (outcome.waited_seconds < budget) {
        const bool worked = subject_->pump();
        env_.clock().advance(1);
        ++outcome.waited_seconds;
        quiet = worked ? 0 : quiet + 1;
        if (quiet >= quiesce_seconds_) {
            outcome.completed = true;
            break;
        }
    }
    return outcome;
}

bool SubjectSession::prompt_delivered() const {
    return last_ok_type_seq_ >= 0 && screen_->last_capture_seq() > last_ok_type_seq_;
}

namespace {

void add_infrastructure_tools(Registry& reg, env::TestEnvironment& env) {
    ToolSignature send;
    send.name = "send_email";
    send.description = "Deliver a message into the test account's inbox.";
    send.params = {{"from_name", ParamType::String, true},
                   {"to", ParamType::String, true},
                   {"subject", ParamType::String, true},
                   {"body", ParamType::String, true},
                   {"attachments", ParamType::StringList, false}};
    reg.register_tool(send, [&env](const ToolCall& call) {
        std::vector<std::string> attachments;
        if (call.args.contains("attachments")) {
            attachments = call.args.at("attachments").get<std::vector<std::string>>();
        }
        env::SendResult r = env.email().send_email(
            call.args.at("from_name").get<std::string>(), call.args.at("to").get<std::string>(),
            call.args.at("subject").get<std::string>(), call.args.at("body").get<std::string>(),
            attachments);
        if (!r.ok) {
            return ToolOutcome::retryable(r.detail + " (" + env::fault_name(*r.fault) + ")",
                                          Json{{"fault", env::fault_name(*r.fault)}});
        }
        const env::EmailMessage* m = env.email().find(r.message_id);
        return ToolOutcome::success(
            "delivered message " + r.message_id + " from " + m->from_addr + " to " + m->to,
            Json{{"id", r.message_id}, {"from", m->from_addr}, {"timestamp", m->timestamp}});
    });

    ToolSignature write;
    write.name = "write_file";
    write.description = "Create or overwrite a file inside the sandboxed home.";
    write.params = {{"path", ParamType::String, true}, {"content", ParamType::String, true}};
    reg.register_tool(write, [&env](const ToolCall& call) {
        const std::string path = call.args.at("path").get<std::string>();
        try {
            env::Sandbox::WriteResult r =
                env.sandbox().write_file(path, call.args.at("content").get<std::string>());
            if (!r.ok) {
                std::string note = r.error;
                Json payload = Json::object();
                if (r.fault) {
                    note += " (" + std::string(env::fault_name(*r.fault)) + ")";
                    payload["fault"] = env::fault_name(*r.fault);
                }
                return ToolOutcome::retryable("cannot write " + path + ": " + note,
                                              std::move(payload));
            }
        } catch (const SpecOpsError& e) {
            if (e.code() == ErrorCode::JailViolation) {
                return ToolOutcome::fatal(tools::FatalKind::JailViolation, e.what());
            }
            throw;
        }
        return ToolOutcome::success("wrote " + path, Json{{"path", path}});
    });

    ToolSignature mkdir;
    mkdir.name = "create_directory";
    mkdir.description = "Create a directory (with parents) inside the sandboxed home.";
    mkdir.params = {{"path", ParamType::String, true}};
    reg.register_tool(mkdir, [&env](const ToolCall& call) {
        const std::string path = call.args.at("path").get<std::string>();
        try {
            env.sandbox().make_dirs(path);
        } catch (const SpecOpsError& e) {
            if (e.code() == ErrorCode::JailViolation) {
                return ToolOutcome::fatal(tools::FatalKind::JailViolation, e.what());
            }
            throw;
        }
        return ToolOutcome::success("created directory " + path, Json{{"path", path}});
    });
}

void add_probe_tools(Registry& reg, env::TestEnvironment& env) {
    ToolSignature probe;
    probe.name = "probe_environment";
    probe.description =
        "Inspect environment state: inbox, sent, thread:<subject> or file:<path>.";
    probe.params = {{"selector", ParamType::String, true}};
    reg.register_tool(probe, [&env](const ToolCall& call) {
        const std::string selector = call.args.at("selector").get<std::string>();
        env::ProbeReport report = env.probe(selector);
        if (report.fault) {
            return ToolOutcome::retryable(
                "probe failed (" + std::string(env::fault_name(*report.fault)) + ")",
                Json{{"fault", env::fault_name(*report.fault)}});
        }
        std::string obs = "probe " + selector + ": " + std::to_string(report.entries.size()) +
                          (report.entries.size() == 1 ? " entry" : " entries");
        for (const auto& e : report.entries) obs += "\n  " + e.key + " " + e.summary;
        return ToolOutcome::success(std::move(obs), report.to_json());
    });
}

void add_investigator_tools(Registry& reg, env::TestEnvironment& env) {
    add_probe_tools(reg, env);

    ToolSignature read;
    read.name = "read_file";
    read.description = "Read a file inside the sandboxed home; absence is a finding, not an error.";
    read.params = {{"path", ParamType::String, true}};
    reg.register_tool(read, [&env](const ToolCall& call) {
        const std::string path = call.args.at("path").get<std::string>();
        try {
            if (!env.sandbox().exists(path) || env.sandbox().is_dir(path)) {
                return ToolOutcome::success("file " + path + " does not exist",
                                            Json{{"path", path}, {"exists", false}});
            }
            const std::string content = env.sandbox().read_file(path);
            return ToolOutcome::success(content,
                                        Json{{"path", path}, {"exists", true}, {"content", content}});
        } catch (const SpecOpsError& e) {
            if (e.code() == ErrorCode::JailViolation) {
                return ToolOutcome::fatal(tools::FatalKind::JailViolation, e.what());
            }
            throw;
        }
    });

    ToolSignature list;
    list.name = "list_directory";
    list.description = "List a directory inside the sandboxed home.";
    list.params = {{"path", ParamType::String, true}};
    reg.register_tool(list, [&env](const ToolCall& call) {
        const std::string path = call.args.at("path").get<std::string>();
        try {
            if (!env.sandbox().is_dir(path)) {
                return ToolOutcome::success("directory " + path + " does not exist",
                                            Json{{"path", path}, {"exists", false}});
            }
            const auto names = env.sandbox().list_dir(path);
            std::string obs = path + ": " + std::to_string(names.size()) +
                              (names.size() == 1 ? " entry" : " entries");
            for (const auto& n : names) obs += "\n  " + n;
            return ToolOutcome::success(std::move(obs),
                                        Json{{"path", path}, {"exists", true}, {"entries", names}});
        } catch (const SpecOpsError& e) {
            if (e.code() == ErrorCode::JailViolation) {
                return ToolOutcome::fatal(tools::FatalKind::JailViolation, e.what());
            }
            throw;
        }
    });
}

ToolOutcome run_launch(SubjectSession* session) {
    if (!session) {
        return ToolOutcome::fatal(tools::FatalKind::ScreenError, "no subject session attached");
    }
    if (session->launched()) {
        return ToolOutcome::success("agent is already running");
    }
    try {
        std::string obs = session->launch();
        return ToolOutcome::success(std::move(obs));
    } catch (const SpecOpsError& e) {
        if (e.code() == ErrorCode::SpawnError) {
            return ToolOutcome::fatal(tools::FatalKind::ScreenError, e.what());
        }
        throw;
    }
}

void add_engineer_tools(Registry& reg, SubjectSession* session, spec::AgentPlatform platform) {
    const bool cli_launch = platform == spec::AgentPlatform::Cli ||
                            platform == spec::AgentPlatform::Desktop ||
                            platform == spec::AgentPlatform::BrowserExtension;
    const bool browser_launch = platform == spec::AgentPlatform::WebApp ||
                                platform == spec::AgentPlatform::Desktop ||
                                platform == spec::AgentPlatform::BrowserExtension;

    if (cli_launch) {
        ToolSignature launch;
        launch.name = "launch_agent";
        launch.description = "Start the agent under test in its terminal.";
        reg.register_tool(launch, [session](const ToolCall&) { return run_launch(session); });
    }
    if (browser_launch) {
        ToolSignature nav;
        nav.name = "navigate_browser";
        nav.description = "Open the agent under test in the browser.";
        nav.params = {{"url", ParamType::String, false}};
        reg.register_tool(nav, [session](const ToolCall&) { return run_launch(session); });
    }

    auto need_session = [session]() -> SubjectSession* {
        if (!session || !session->launched()) return nullptr;
        return session;
    };

    ToolSignature click;
    click.name = "click_text";
    click.description = "Click visible text; ambiguity is reported back, never guessed through.";
    click.params = {{"target", ParamType::String, true}, {"hint", ParamType::Object, false}};
    reg.register_tool(click, [need_session](const ToolCall& call) {
        SubjectSession* s = need_session();
        if (!s) return ToolOutcome::fatal(tools::FatalKind::ScreenError, "agent is not running");
        std::optional<ui::PositionHint> hint;
        if (call.args.contains("hint")) hint = ui::PositionHint::from_json(call.args.at("hint"));
        const std::string target = call.args.at("target").get<std::string>();
        ui::ClickResult r = ui::click_text(s->screen(), target, hint);
        switch (r.status) {
            case ui::ClickStatus::Ok:
                return ToolOutcome::success("clicked \"" + target + "\" at " + r.span_id,
                                            Json{{"status", "ok"}, {"span_id", r.span_id}});
            case ui::ClickStatus::Ambiguous:
                return ToolOutcome::success(
                    "ambiguous: " + std::to_string(r.match_count) + " matches for \"" + target +
                        "\"; add a position hint",
                    Json{{"status", "ambiguous"}, {"match_count", r.match_count}});
            case ui::ClickStatus::NotFound:
                return ToolOutcome::success("\"" + target + "\" is not visible on screen",
                                            Json{{"status", "not_found"}});
        }
        return ToolOutcome::fatal(tools::FatalKind::ScreenError, "unreachable");
    });

    ToolSignature type;
    type.name = "type_text";
    type.description = "Type into the focused field and verify the text landed on screen.";
    type.params = {{"text", ParamType::String, true}};
    reg.register_tool(type, [need_session](const ToolCall& call) {
        SubjectSession* s = need_session();
        if (!s) return ToolOutcome::fatal(tools::FatalKind::ScreenError, "agent is not running");
        ui::TypeResult r = s->type_text(call.args.at("text").get<std::string>());
        const char* status = r.status == ui::TypeStatus::Ok ? "ok"
                             : r.status == ui::TypeStatus::NeedsFocus ? "needs_focus"
                                                                      : "verification_failed";
        return ToolOutcome::success(r.feedback, Json{{"status", status}});
    });

    ToolSignature press;
    press.name = "press_key";
    press.description = "Press a key: \"enter\" or a single character.";
    press.params = {{"key", ParamType::String, true}};
    reg.register_tool(press, [need_session](const ToolCall& call) {
        SubjectSession* s = need_session();
        if (!s) return ToolOutcome::fatal(tools::FatalKind::ScreenError, "agent is not running");
        const std::string key = call.args.at("key").get<std::string>();
        std::string lowered = key;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (lowered == "enter" || lowered == "return") {
            s->press_enter();
        } else if (key.size() == 1) {
            s->screen().send_keys(key);
        } else {
            return ToolOutcome::fatal(tools::FatalKind::BadArgs, "unsupported key '" + key + "'");
        }
        return ToolOutcome::success("pressed " + lowered);
    });

    ToolSignature read;
    read.name = "read_screen";
    read.description = "Return the current screen contents as text.";
    reg.register_tool(read, [need_session](const ToolCall&) {
        SubjectSession* s = need_session();
        if (!s) return ToolOutcome::fatal(tools::FatalKind::ScreenError, "agent is not running");
        const ui::Frame& f = s->screen().frame();
        std::string text;
        for (int r = 0; r < f.rows(); ++r) {
            std::string row = f.row(r);
            const std::size_t end = row.find_last_not_of(' ');
            row = end == std::string::npos ? "" : row.substr(0, end + 1);
            if (r > 0) text.push_back('\n');
            text += row;
        }
        return ToolOutcome::success(std::move(text), Json{{"rows", f.rows()}, {"cols", f.cols()}});
    });

    ToolSignature wait;
    wait.name = "wait_for_completion";
    wait.description = "Wait until the agent goes quiet, or the wait budget runs out.";
    wait.params = {{"max_seconds", ParamType::Int, false}};
    reg.register_tool(wait, [need_session](const ToolCall& call) {
        SubjectSession* s = need_session();
        if (!s) return ToolOutcome::fatal(tools::FatalKind::ScreenError, "agent is not running");
        const int budget = call.args.value("max_seconds", 0);
        SubjectSession::WaitOutcome w = s->wait_for_completion(budget);
        std::string obs =
            w.completed
                ? "agent settled after " + std::to_string(w.waited_seconds) + " virtual seconds"
                : "wait timed out after " + std::to_string(w.waited_seconds) +
                      " virtual seconds; agent is still active";
        return ToolOutcome::success(std::move(obs), Json{{"completed", w.completed},
                                                         {"waited_seconds", w.waited_seconds}});
    });
}

} // namespace

Registry make_registry(SpecialistRole role, env::TestEnvironment& env, SubjectSession* session,
                       spec::AgentPlatform platform) {
    Registry reg(role);
    switch (role) {
        case SpecialistRole::InfrastructureManager:
            add_infrastructure_tools(reg, env);
            add_probe_tools(reg, env);
            break;
        case SpecialistRole::Engineer:
            add_engineer_tools(reg, session, platform);
            break;
        case SpecialistRole::Investigator:
            add_investigator_tools(reg, env);
            break;
        case SpecialistRole::TestArchitect:
        case SpecialistRole::TestAnalyst:
        case SpecialistRole::Judge:
            break; // protocol-only roles act through structured replies
    }
    return reg;
}

} // namespace specops::registries
