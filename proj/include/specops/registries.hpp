#pragma once

#include <memory>
#include <string>

#include "specops/mock_subjects.hpp"
#include "specops/roles.hpp"
#include "specops/spec_model.hpp"
#include "specops/test_env.hpp"
#include "specops/tool_protocol.hpp"
#include "specops/ui_toolkit.hpp"

namespace specops::registries {

/// Owns the screen and the spawned subject for one prompt delivery, plus the
/// bookkeeping the run record needs (typing attempts, completion waits).
class SubjectSession {
public:
    SubjectSession(env::TestEnvironment& env, mocks::BehaviorScript script,
                   int quiesce_seconds = 10, int max_wait_seconds = 120);

    bool launched() const { return subject_ != nullptr; }
    /// Spawns the subject, opens the capture session, returns a summary line.
    std::string launch();
    ui::VirtualTerminal& screen();
    std::shared_ptr<ui::VirtualTerminal> screen_ptr() { return screen_; }
    mocks::MockSubject& subject();

    ui::TypeResult type_text(const std::string& text);
    void press_enter();
    /// One subject action per virtual second until the queue stays empty for
    /// the quiescence window, or the wait budget runs out.
    struct WaitOutcome {
        bool completed = false;
        int waited_seconds = 0;
    };
    WaitOutcome wait_for_completion(int max_seconds = 0); // 0 = configured default

    int type_attempts() const { return type_attempts_; }
    /// True once some verified typing was followed by further screen
    /// activity, i.e. the prompt went in and the agent visibly reacted.
    bool prompt_delivered() const;
    int quiesce_seconds() const { return quiesce_seconds_; }

private:
    env::TestEnvironment& env_;
    mocks::BehaviorScript script_;
    std::shared_ptr<ui::VirtualTerminal> screen_;
    std::unique_ptr<mocks::MockSubject> subject_;
    int quiesce_seconds_;
    int max_wait_seconds_;
    int type_attempts_ = 0;
    int last_ok_type_seq_ = -1;
};

/// The fixed action space for a role. Architect, Analyst and Judge work
/// purely through the conversation protocol and get empty registries;
/// the environment roles see the environment, the Engineer sees the screen.
tools::Registry make_registry(SpecialistRole role, env::TestEnvironment& env,
                              SubjectSession* session, spec::AgentPlatform platform);

} // namespace specops::registries
