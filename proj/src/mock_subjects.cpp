#include "specops/mock_subjects.hpp"

#include <algorithm>
#include <cctype>

#include "specops/errors.hpp"

namespace specops::mocks {

const char* bug_behavior_name(BugBehavior b) {
    switch (b) {
        case BugBehavior::WrongPathBackup: return "wrong_path_backup";
        case BugBehavior::PlaceholderSignoff: return "placeholder_signoff";
        case BugBehavior::MisreportSuccess: return "misreport_success";
        case BugBehavior::SilentPartial: return "silent_partial";
    }
    return "unknown";
}

BugBehavior bug_behavior_from_name(const std::string& name) {
    if (name == "wrong_path_backup") return BugBehavior::WrongPathBackup;
    if (name == "placeholder_signoff") return BugBehavior::PlaceholderSignoff;
    if (name == "misreport_success") return BugBehavior::MisreportSuccess;
    if (name == "silent_partial") return BugBehavior::SilentPartial;
    throw SpecOpsError(ErrorCode::ConfigError, "unknown bug behavior '" + name + "'");
}

Json BehaviorScript::to_json() const {
    Json j;
    j["agent_name"] = agent_name;
    j["persona"] = persona;
    j["ui"] = ui;
    j["cwd"] = cwd;
    j["triggers"] = Json::array();
    for (const auto& t : triggers) {
        Json jt;
        jt["pattern"] = t.pattern;
        jt["actions"] = Json::array();
        for (const auto& a : t.actions) {
            Json ja = a.args.is_object() ? a.args : Json::object();
            ja["op"] = a.op;
            jt["actions"].push_back(std::move(ja));
        }
        j["triggers"].push_back(std::move(jt));
    }
    j["bugs"] = Json::array();
    for (const auto& b : bugs) j["bugs"].push_back(bug_behavior_name(b));
    return j;
}

BehaviorScript BehaviorScript::from_json(const Json& j) {
    BehaviorScript s;
    if (j.contains("agent_name")) s.agent_name = j.at("agent_name").get<std::string>();
    if (j.contains("persona")) s.persona = j.at("persona").get<std::string>();
    if (j.contains("ui")) s.ui = j.at("ui").get<std::string>();
    if (s.ui != "cli" && s.ui != "webmail") {
        throw SpecOpsError(ErrorCode::ConfigError, "unknown subject ui '" + s.ui + "'");
    }
    if (j.contains("cwd")) s.cwd = j.at("cwd").get<std::string>();
    for (const auto& jt : j.value("triggers", Json::array())) {
        ScriptTrigger t;
        t.pattern = jt.at("pattern").get<std::string>();
        for (const auto& ja : jt.value("actions", Json::array())) {
            ScriptAction a;
            a.op = ja.at("op").get<std::string>();
            a.args = ja;
            a.args.erase("op");
            t.actions.push_back(std::move(a));
        }
        s.triggers.push_back(std::move(t));
    }
    for (const auto& jb : j.value("bugs", Json::array())) {
        s.bugs.insert(bug_behavior_from_name(jb.get<std::string>()));
    }
    return s;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

MockSubject::MockSubject(BehaviorScript script, env::TestEnvironment& env,
                         std::shared_ptr<ui::VirtualTerminal> screen)
    : script_(std::move(script)), env_(env), screen_(std::move(screen)) {
    if (!screen_) {
        throw SpecOpsError(ErrorCode::SpawnError, "subject needs a screen");
    }
    if (!script_.cwd.empty()) {
        try {
            env_.sandbox().set_cwd(script_.cwd);
        } catch (const SpecOpsError& e) {
            throw SpecOpsError(ErrorCode::SpawnError,
                               std::string("cannot start in '") + script_.cwd + "': " + e.what());
        }
    }
}

void MockSubject::receive_prompt(const std::string& prompt) {
    const std::string needle = lower(prompt);
    const ScriptTrigger* matched = nullptr;
    for (const auto& t : script_.triggers) {
        if (needle.find(lower(t.pattern)) != std::string::npos) {
            matched = &t;
            break;
        }
    }
    if (!matched) {
        queue_.push_back({"print", Json{{"text", "I don't know how to help with that."}}});
        return;
    }
    std::size_t take = matched->actions.size();
    if (script_.has_bug(BugBehavior::SilentPartial) && take > 1) {
        take = (take + 1) / 2; // quietly drops the tail of the plan
    }
    for (std::size_t i = 0; i < take; ++i) queue_.push_back(matched->actions[i]);
}

bool MockSubject::pump() {
    if (queue_.empty()) return false;
    ScriptAction action = std::move(queue_.front());
    queue_.pop_front();
    ++actions_run_;
    run_action(action);
    return true;
}

void MockSubject::print_line(const std::string& text) {
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            lines_.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty() || text.empty() || text.back() != '\n') {
        lines_.push_back(current);
    }
    redraw_output();
}

void MockSubject::redraw_output() {
    const int top = output_top();
    const int bottom = output_bottom();
    const int height = bottom - top + 1;
    const int width = screen_->frame().cols();
    const std::size_t first =
        lines_.size() > static_cast<std::size_t>(height) ? lines_.size() - height : 0;
    for (int row = 0; row < height; ++row) {
        const std::size_t idx = first + static_cast<std::size_t>(row);
        std::string shown = idx < lines_.size() ? lines_[idx] : std::string();
        if (static_cast<int>(shown.size()) > width) shown.resize(static_cast<std::size_t>(width));
        shown.resize(static_cast<std::size_t>(width), ' ');
        screen_->draw_text(top + row, 0, shown);
    }
}

void MockSubject::run_action(const ScriptAction& action) {
    if (action.op == "print") {
        print_line(action.args.value("text", ""));
    } else if (action.op == "idle") {
        // a tick of silence
    } else if (action.op == "spin") {
        print_line(action.args.value("text", "working..."));
        queue_.push_back(action); // never settles
    } else if (action.op == "exec") {
        const std::string cmd = action.args.value("cmd", "");
        print_line("$ " + cmd);
        env::CmdResult r = env_.sandbox().exec(cmd);
        if (!r.out.empty()) print_line(r.out);
        if (r.ok()) return;
        if (script_.has_bug(BugBehavior::MisreportSuccess)) {
            print_line("Command completed successfully.");
        } else if (!r.err.empty()) {
            print_line(r.err);
        }
    } else if (action.op == "backup") {
        const std::string src = action.args.value("src", "projects");
        const std::string dest = action.args.value("dest", "backup_projects");
        const bool wrong_path = script_.has_bug(BugBehavior::WrongPathBackup);
        const std::string prefix = wrong_path ? "~/" : "./";
        const std::string cmd = "cp -r " + prefix + src + " " + prefix + dest;
        print_line("$ " + cmd);
        env::CmdResult r = env_.sandbox().exec(cmd);
        if (!r.out.empty()) print_line(r.out);
        if (!r.err.empty()) print_line(r.err);
        // checking the exit status is exactly what the buggy agent skips
        print_line("Backup complete. Files copied to " + dest + ".");
    } else if (action.op == "reply_email") {
        const auto& inbox = env_.email().inbox();
        if (inbox.empty()) {
            print_line("No email found to reply to.");
            return;
        }
        const env::EmailMessage* newest = &inbox.front();
        for (const auto& m : inbox) {
            if (m.timestamp >= newest->timestamp) newest = &m;
        }
        std::string body = action.args.value("greeting", "Hi " + newest->from_name + ",");
        body += "\n\n";
        for (const auto& line : action.args.value("body_lines", std::vector<std::string>{})) {
            body += line + "\n";
        }
        body += "\nBest regards,\n";
        body += script_.has_bug(BugBehavior::PlaceholderSignoff) ? "[your name]" : script_.persona;
        const std::string subject = "Re: " + newest->subject;
        env_.email().deliver_sent(script_.persona, newest->from_addr, subject, body, newest->id);
        print_line("Reply sent to " + newest->from_addr + ".");
    } else {
        throw SpecOpsError(ErrorCode::ConfigError, "unknown script op '" + action.op + "'");
    }
}

MockCliAgent::MockCliAgent(BehaviorScript script, env::TestEnvironment& env,
                           std::shared_ptr<ui::VirtualTerminal> screen)
    : MockSubject(std::move(script), env, std::move(screen)) {}

void MockCliAgent::render_initial() {
    const int cols = screen_->frame().cols();
    screen_->draw_text(0, 0, "== " + script_.agent_name + " interactive console ==");
    screen_->draw_text(1, 0, std::string(static_cast<std::size_t>(cols), '-'));
    screen_->draw_text(37, 0, std::string(static_cast<std::size_t>(cols), '-'));
    const std::string label = script_.agent_name + "> ";
    screen_->draw_text(38, 0, label);
    ui::InputField field;
    field.id = "prompt";
    field.row = 38;
    field.col = static_cast<int>(label.size());
    field.width = cols - field.col - 1;
    field.click_col_start = 0;
    field.click_col_end = cols;
    screen_->define_field(field);
    screen_->on_submit([this](const std::string&, const std::string& content) {
        screen_->set_field_content("prompt", "");
        print_line(script_.agent_name + "> " + content);
        receive_prompt(content);
    });
}

MockWebMail::MockWebMail(BehaviorScript script, env::TestEnvironment& env,
                         std::shared_ptr<ui::VirtualTerminal> screen)
    : MockSubject(std::move(script), env, std::move(screen)) {}

void MockWebMail::render_initial() {
    const int cols = screen_->frame().cols();
    const auto& inbox = env_.email().inbox();
    screen_->draw_text(0, 0, "Mail - Inbox (" + std::to_string(inbox.size()) + ")");
    screen_->draw_text(1, 0, std::string(static_cast<std::size_t>(cols), '='));
    int row = 2;
    for (const auto& m : inbox) {
        if (row > 7) break;
        screen_->draw_text(row++, 0,
                           "From: " + m.from_name + "  Subject: " + m.subject + "  " +
                               format_utc(m.timestamp));
    }
    if (!inbox.empty()) {
        const auto& m = inbox.front();
        screen_->draw_text(9, 0, std::string(static_cast<std::size_t>(cols), '-'));
        screen_->draw_text(10, 0, "Subject: " + m.subject);
        screen_->draw_text(11, 0, "From: " + m.from_name + " <" + m.from_addr + ">");
        int body_row = 13;
        std::size_t start = 0;
        while (body_row < 26 && start <= m.body.size()) {
            const std::size_t nl = m.body.find('\n', start);
            std::string line = m.body.substr(start, nl == std::string::npos ? nl : nl - start);
            if (static_cast<int>(line.size()) > cols) line.resize(static_cast<std::size_t>(cols));
            screen_->draw_text(body_row++, 2, line);
            if (nl == std::string::npos) break;
            start = nl + 1;
        }
    }
    screen_->draw_text(27, 0, std::string(static_cast<std::size_t>(cols), '-'));
    const std::string label = "Assistant prompt: ";
    screen_->draw_text(28, 0, label);
    ui::InputField field;
    field.id = "assistant";
    field.row = 28;
    field.col = static_cast<int>(label.size());
    field.width = cols - field.col - 1;
    field.click_col_start = 0;
    field.click_col_end = cols;
    screen_->define_field(field);
    screen_->on_submit([this](const std::string&, const std::string& content) {
        screen_->set_field_content("assistant", "");
        print_line("> " + content);
        receive_prompt(content);
    });
}

std::unique_ptr<MockSubject> spawn_subject(BehaviorScript script, env::TestEnvironment& env,
                                           std::shared_ptr<ui::VirtualTerminal> screen) {
    std::unique_ptr<MockSubject> subject;
    if (script.ui == "webmail") {
        subject = std::make_unique<MockWebMail>(std::move(script), env, std::move(screen));
    } else {
        subject = std::make_unique<MockCliAgent>(std::move(script), env, std::move(screen));
    }
    subject->render_initial();
    return subject;
}

} // namespace specops::mocks
