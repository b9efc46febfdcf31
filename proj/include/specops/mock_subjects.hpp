#pragma once

#include <deque>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "specops/json_util.hpp"
#include "specops/test_env.hpp"
#include "specops/ui_toolkit.hpp"

namespace specops::mocks {

/// Deliberate defects a scripted subject can carry. A subject with no bugs
/// is the control: the same scenario must then come out clean.
enum class BugBehavior {
    WrongPathBackup,    // backs up from the home root instead of the working directory
    PlaceholderSignoff, // leaves "[your name]" in outgoing mail
    MisreportSuccess,   // claims a failed command succeeded
    SilentPartial,      // performs only part of the requested work, says nothing
};

const char* bug_behavior_name(BugBehavior b);
BugBehavior bug_behavior_from_name(const std::string& name);

struct ScriptAction {
    std::string op; // print | exec | backup | reply_email | idle | spin
    Json args;
};

struct ScriptTrigger {
    std::string pattern; // case-insensitive substring of the prompt
    std::vector<ScriptAction> actions;
};

/// Fully deterministic stand-in for an agent under test: prompt patterns map
/// to canned action queues, optionally degraded by bug flags.
struct BehaviorScript {
    std::string agent_name = "mock-agent";
    std::string persona = "Alex Morgan"; // name the agent signs mail with
    std::string ui = "cli";              // "cli" or "webmail"
    std::string cwd;                     // working directory at spawn, "" for home
    std::vector<ScriptTrigger> triggers;
    std::set<BugBehavior> bugs;

    bool has_bug(BugBehavior b) const { return bugs.count(b) > 0; }

    Json to_json() const;
    static BehaviorScript from_json(const Json& j);
};

/// A spawned subject wired to a virtual screen and the shared environment.
/// It does one queued action per pump; the harness advances time between
/// pumps, so quiescence is simply an empty queue.
class MockSubject {
public:
    MockSubject(BehaviorScript script, env::TestEnvironment& env,
                std::shared_ptr<ui::VirtualTerminal> screen);
    virtual ~MockSubject() = default;

    ui::VirtualTerminal& screen() { return *screen_; }
    const BehaviorScript& script() const { return script_; }

    /// Delivered by the UI when the operator submits the prompt field.
    void receive_prompt(const std::string& prompt);
    /// Runs one queued action. False means the queue was already empty.
    bool pump();
    bool busy() const { return !queue_.empty(); }
    int actions_run() const { return actions_run_; }

    virtual void render_initial() = 0;

protected:
    void print_line(const std::string& text);
    virtual int output_top() const = 0;
    virtual int output_bottom() const = 0;

    BehaviorScript script_;
    env::TestEnvironment& env_;
    std::shared_ptr<ui::VirtualTerminal> screen_;

private:
    void run_action(const ScriptAction& action);
    void redraw_output();

    std::deque<ScriptAction> queue_;
    std::vector<std::string> lines_;
    int actions_run_ = 0;
};

/// Terminal-style agent: banner, scrolling output, "<name>> " prompt line.
/// The prompt field starts unfocused, as a freshly opened window would.
class MockCliAgent : public MockSubject {
public:
    MockCliAgent(BehaviorScript script, env::TestEnvironment& env,
                 std::shared_ptr<ui::VirtualTerminal> screen);
    void render_initial() override;

protected:
    int output_top() const override { return 3; }
    int output_bottom() const override { return 35; }
};

/// Webmail-style agent: inbox listing, message preview, an assistant prompt
/// box and a status area where the agent reports what it did.
class MockWebMail : public MockSubject {
public:
    MockWebMail(BehaviorScript script, env::TestEnvironment& env,
                std::shared_ptr<ui::VirtualTerminal> screen);
    void render_initial() override;

protected:
    int output_top() const override { return 30; }
    int output_bottom() const override { return 38; }
};

/// Builds the right subject for the script's "ui" kind and renders it.
std::unique_ptr<MockSubject> spawn_subject(BehaviorScript script, env::TestEnvironment& env,
                                           std::shared_ptr<ui::VirtualTerminal> screen);

} // namespace specops::mocks
