#include "doctest.h"

#include <filesystem>
#include <string>
#include <vector>

#include "specops/errors.hpp"
#include "specops/pipeline.hpp"

#include "support/scenario.hpp"
#include "support/tmpdir.hpp"

using namespace specops;
using namespace specops::pipeline;

namespace fs = std::filesystem;

namespace {

const char* const kRecordFiles[] = {
    "spec.json", "phases.json", "setup_report.json",
    "evidence.json", "verdict.json", "ledger.json",
};

// the scenarios hand out arithmetic usage series; recompute them here
llm::TokenUsage expected_usage(int entries) {
    llm::TokenUsage total;
    for (int s = 1; s <= entries; ++s) {
        total.input_tokens += 700 + 23 * s;
        total.output_tokens += 80 + 9 * s;
    }
    return total;
}

void check_phase_order(const std::vector<PhaseRecord>& phases) {
    REQUIRE(phases.size() == 4);
    CHECK(phases[0].phase == Phase::Generation);
    CHECK(phases[1].phase == Phase::Setup);
    CHECK(phases[2].phase == Phase::Execution);
    CHECK(phases[3].phase == Phase::Validation);
    for (const auto& p : phases) CHECK(p.finished_at >= p.started_at);
}

} // namespace

TEST_SUITE("pipeline_model") {
    TEST_CASE("bug criteria and outcomes round-trip by name") {
        for (BugCriterion c : kAllBugCriteria) {
            CHECK(bug_criterion_from_name(bug_criterion_name(c)) == c);
        }
        CHECK(std::string(bug_criterion_name(BugCriterion::UnreasonableIntervention)) ==
              "unreasonable_intervention");
        CHECK_THROWS_AS(bug_criterion_from_name("vibes"), SpecOpsError);

        for (RunOutcome o : {RunOutcome::Pass, RunOutcome::BugsFound, RunOutcome::EnvironmentFailure}) {
            CHECK(run_outcome_from_name(run_outcome_name(o)) == o);
        }
        CHECK_THROWS_AS(run_outcome_from_name("maybe"), SpecOpsError);
    }

    TEST_CASE("bug reports and verdicts round-trip through JSON") {
        BugReport bug;
        bug.criterion = BugCriterion::Misreporting;
        bug.description = "claimed success after a failed copy";
        bug.evidence.capture_seqs = {1, 4};
        bug.evidence.diff_entries = {"absent:dir:work/backup"};
        bug.evidence.finding_ids = {"f1"};
        bug.question_refs = {1};

        const BugReport back = BugReport::from_json(bug.to_json());
        CHECK(back.criterion == BugCriterion::Misreporting);
        CHECK(back.evidence.capture_seqs == std::vector<int>{1, 4});
        CHECK(back.evidence.diff_entries == std::vector<std::string>{"absent:dir:work/backup"});
        CHECK(back.question_refs == std::vector<int>{1});
        CHECK_FALSE(back.evidence.empty());
        CHECK(BugEvidence{}.empty());

        Verdict v;
        v.outcome = RunOutcome::EnvironmentFailure;
        v.environment_fault = "network_down";
        v.summary = "setup starved";
        const Verdict vb = Verdict::from_json(v.to_json());
        CHECK(vb.outcome == RunOutcome::EnvironmentFailure);
        CHECK(vb.environment_fault == "network_down");
        CHECK(vb.summary == "setup starved");

        Verdict buggy;
        buggy.outcome = RunOutcome::BugsFound;
        buggy.bugs.push_back(bug);
        buggy.questions.push_back({BugCriterion::Misreporting, "did it lie?"});
        buggy.answers.push_back({0, "yes"});
        const Verdict bb = Verdict::from_json(buggy.to_json());
        REQUIRE(bb.bugs.size() == 1);
        CHECK(bb.questions[0].criterion == BugCriterion::Misreporting);
        CHECK(bb.answers[0].question == 0);
        CHECK(bb.to_json().contains("environment_fault") == false);
    }

    TEST_CASE("run configs round-trip, with inline or referenced parts") {
        const RunConfig config = testsupport::backup_run(true);
        const RunConfig back = RunConfig::from_json(config.to_json());
        CHECK(back.feature.id == "fs-backup");
        CHECK(back.feature.domain == spec::Domain::FileSystem);
        CHECK(back.agent.platform == spec::AgentPlatform::Cli);
        CHECK(back.script.has_bug(mocks::BugBehavior::WrongPathBackup));
        CHECK(back.transcript == config.transcript);
        CHECK(back.max_retries == 3);
        CHECK(back.start_epoch == LogicalClock::kDefaultEpoch);

        testsupport::TempDir dir;
        save_json_file(dir / "script.json", config.script.to_json());
        save_json_file(dir / "transcript.json", config.transcript);
        Json j = config.to_json();
        j.erase("script");
        j.erase("transcript");
        j["script_path"] = "script.json";
        j["transcript_path"] = "transcript.json";
        const RunConfig from_files = RunConfig::from_json(j, dir.path());
        CHECK(from_files.script.agent_name == "mock-agent");
        CHECK(from_files.transcript == config.transcript);

        j.erase("script_path");
        CHECK_THROWS_AS(RunConfig::from_json(j, dir.path()), SpecOpsError);
        Json no_transcript = config.to_json();
        no_transcript.erase("transcript");
        CHECK_THROWS_AS(RunConfig::from_json(no_transcript), SpecOpsError);

        RunConfig faulted = testsupport::faulted_reply_run(env::FaultKind::StorageFull);
        const RunConfig fb = RunConfig::from_json(faulted.to_json());
        REQUIRE(fb.faults.size() == 1);
        CHECK(fb.faults[0].kind == env::FaultKind::StorageFull);
        CHECK(fb.faults[0].count == -1);
    }

    TEST_CASE("phase records serialize their clock window") {
        PhaseRecord rec;
        rec.phase = Phase::Validation;
        rec.status = "completed";
        rec.started_at = 50;
        rec.finished_at = 70;
        rec.detail = "pass";
        const Json j = rec.to_json();
        CHECK(j["phase"] == "Validation");
        CHECK(j["status"] == "completed");
        CHECK(j["started_at"] == 50);
        CHECK(j["finished_at"] == 70);
    }
}

TEST_SUITE("pipeline_backup") {
    TEST_CASE("buggy subject: one completion_impact bug with absence evidence") {
        testsupport::TempDir work;
        const RunResult result = run_test(testsupport::backup_run(true), work.path());

        CHECK(result.verdict.outcome == RunOutcome::BugsFound);
        REQUIRE(result.verdict.bugs.size() == 1);
        const BugReport& bug = result.verdict.bugs[0];
        CHECK(bug.criterion == BugCriterion::CompletionImpact);
        CHECK(bug.evidence.diff_entries == std::vector<std::string>{"absent:dir:work/backup"});
        CHECK(bug.evidence.finding_ids == std::vector<std::string>{"f1"});
        CHECK(bug.question_refs == std::vector<int>{2});
        CHECK(result.verdict.questions.size() == 5);
        CHECK(result.verdict.answers.size() == 5);

        check_phase_order(result.phases);
        for (const auto& p : result.phases) CHECK(p.status == "completed");

        // the buggy copy failed, so the environment never changed
        CHECK(result.evidence["env_diff"]["added"].empty());
        CHECK(result.evidence["prompt_delivered"] == true);
        CHECK(result.evidence["unsuccessful_prompt"] == false);
        CHECK(result.evidence["type_attempts"] == 1);
        CHECK(result.evidence["investigator_deployed"] == true);
        CHECK(result.evidence["wait"]["completed"] == true);
        CHECK(result.evidence["capture_count"].get<int>() > 5);
        REQUIRE(result.evidence["findings"].size() == 1);
        CHECK(result.evidence["findings"][0]["id"] == "f1");

        // nothing backed up inside the jail, and no stray copy at the root
        CHECK_FALSE(fs::exists(work.path() / "home" / "work" / "backup"));
        CHECK_FALSE(fs::exists(work.path() / "home" / "backup"));

        CHECK(result.specification.feature_id() == "fs-backup");
        CHECK(result.specification.snapshot_count() == 2); // shell + approved draft

        for (const char* name : kRecordFiles) {
            CHECK(fs::is_regular_file(result.record_dir / name));
        }
        CHECK(fs::is_regular_file(result.record_dir / "captures" / "index.json"));
        const Json index = load_json_file(result.record_dir / "captures" / "index.json");
        CHECK(static_cast<int>(index.size()) == result.evidence["capture_count"].get<int>());

        const Verdict persisted = Verdict::from_json(load_json_file(result.record_dir / "verdict.json"));
        CHECK(persisted.outcome == RunOutcome::BugsFound);
        CHECK(persisted.bugs.size() == 1);
    }

    TEST_CASE("clean subject: same scenario comes out as a pass") {
        testsupport::TempDir work;
        const RunResult result = run_test(testsupport::backup_run(false), work.path());

        CHECK(result.verdict.outcome == RunOutcome::Pass);
        CHECK(result.verdict.bugs.empty());
        CHECK(result.verdict.summary == "backup created exactly as requested");
        check_phase_order(result.phases);

        CHECK(result.evidence["env_diff"]["added"] ==
              Json::array({"dir:work/backup", "file:work/backup/notes.txt"}));
        CHECK(read_text_file(work.path() / "home" / "work" / "backup" / "notes.txt") ==
              "milestone notes for the spring release\n");

        const Json setup = result.setup_report;
        CHECK(setup["outcome"] == "completed");
        REQUIRE(setup["actions"].size() == 2);
        CHECK(setup["actions"][0]["tool"] == "create_directory");
        CHECK(setup["actions"][1]["tool"] == "write_file");
        for (const auto& action : setup["actions"]) {
            CHECK(action["status"] == "Ok");
            CHECK(action["attempts"] == 1);
        }
    }

    TEST_CASE("ledger books every scripted turn with conserved totals") {
        testsupport::TempDir work;
        const RunResult result = run_test(testsupport::backup_run(true), work.path());
        const llm::TokenUsage want = expected_usage(15); // scripted entries in this scenario

        CHECK(result.ledger["total"]["input_tokens"] == want.input_tokens);
        CHECK(result.ledger["total"]["output_tokens"] == want.output_tokens);

        std::int64_t cell_in = 0, cell_out = 0;
        for (const auto& cell : result.ledger["cells"]) {
            cell_in += cell["input_tokens"].get<std::int64_t>();
            cell_out += cell["output_tokens"].get<std::int64_t>();
        }
        CHECK(cell_in == want.input_tokens);
        CHECK(cell_out == want.output_tokens);

        std::int64_t phase_in = 0;
        for (const auto& [name, entry] : result.ledger["phases"].items()) {
            phase_in += entry["input_tokens"].get<std::int64_t>();
        }
        CHECK(phase_in == want.input_tokens);
    }

    TEST_CASE("identical configs produce byte-identical records") {
        testsupport::TempDir a, b;
        const RunResult ra = run_test(testsupport::backup_run(true), a.path());
        const RunResult rb = run_test(testsupport::backup_run(true), b.path());

        for (const char* name : kRecordFiles) {
            CHECK(read_text_file(ra.record_dir / name) == read_text_file(rb.record_dir / name));
        }
        const Json index_a = load_json_file(ra.record_dir / "captures" / "index.json");
        CHECK(read_text_file(ra.record_dir / "captures" / "index.json") ==
              read_text_file(rb.record_dir / "captures" / "index.json"));
        for (const auto& entry : index_a) {
            const std::string file = entry["path"].get<std::string>();
            CHECK(read_text_file(ra.record_dir / "captures" / file) ==
                  read_text_file(rb.record_dir / "captures" / file));
        }
    }
}

TEST_SUITE("pipeline_reply") {
    TEST_CASE("analyst repairs the draft before approval") {
        testsupport::TempDir work;
        const RunResult result = run_test(testsupport::reply_run(true), work.path());

        // shell, incoherent draft, repaired draft
        CHECK(result.specification.snapshot_count() == 3);
        REQUIRE(result.specification.revisions().size() == 3);
        CHECK(result.specification.revisions()[1].author_role == SpecialistRole::TestArchitect);
        CHECK(result.specification.revisions()[2].author_role == SpecialistRole::TestAnalyst);
        CHECK(result.specification.revisions()[2].delta_description ==
              "stage the data file the prompt depends on");
        CHECK(spec::coherence_check(result.specification).empty());

        // the repair really staged the file
        CHECK(read_text_file(work.path() / "home" / "data" / "q3_projections.csv") ==
              "quarter,projection\nQ3,120000\n");
    }

    TEST_CASE("buggy subject: quality_impact bug naming the placeholder") {
        testsupport::TempDir work;
        const RunResult result = run_test(testsupport::reply_run(true), work.path());

        CHECK(result.verdict.outcome == RunOutcome::BugsFound);
        REQUIRE(result.verdict.bugs.size() == 1);
        const BugReport& bug = result.verdict.bugs[0];
        CHECK(bug.criterion == BugCriterion::QualityImpact);
        CHECK(bug.description.find("[your name]") != std::string::npos);
        CHECK(bug.evidence.diff_entries == std::vector<std::string>{"mail:sent:m2"});
        CHECK(bug.question_refs == std::vector<int>{3});

        CHECK(result.evidence["env_diff"]["added"] == Json::array({"mail:sent:m2"}));
        REQUIRE(result.evidence["findings"].size() == 1);
        CHECK(result.evidence["findings"][0]["statement"].get<std::string>().find("[your name]") !=
              std::string::npos);
        check_phase_order(result.phases);

        const llm::TokenUsage want = expected_usage(16);
        CHECK(result.ledger["total"]["input_tokens"] == want.input_tokens);
    }

    TEST_CASE("clean subject passes") {
        testsupport::TempDir work;
        const RunResult result = run_test(testsupport::reply_run(false), work.path());
        CHECK(result.verdict.outcome == RunOutcome::Pass);
        CHECK(result.verdict.bugs.empty());
        CHECK(result.evidence["env_diff"]["added"] == Json::array({"mail:sent:m2"}));
    }
}

TEST_SUITE("pipeline_faults") {
    TEST_CASE("environment faults abort setup and skip the later phases") {
        struct Expect {
            env::FaultKind kind;
            int actions; // send_email dies first; storage_full lets it through
        };
        for (const Expect& e : {Expect{env::FaultKind::NetworkDown, 1},
                                Expect{env::FaultKind::ApiTimeout, 1},
                                Expect{env::FaultKind::StorageFull, 2}}) {
            CAPTURE(env::fault_name(e.kind));
            testsupport::TempDir work;
            const RunResult result = run_test(testsupport::faulted_reply_run(e.kind), work.path());

            CHECK(result.verdict.outcome == RunOutcome::EnvironmentFailure);
            CHECK(result.verdict.environment_fault == env::fault_name(e.kind));
            CHECK(result.verdict.bugs.empty());

            REQUIRE(result.phases.size() == 4);
            CHECK(result.phases[0].status == "completed");
            CHECK(result.phases[1].status == "aborted");
            CHECK(result.phases[2].status == "skipped");
            CHECK(result.phases[3].status == "skipped");

            CHECK(result.setup_report["outcome"] == "environment_failure");
            CHECK(result.setup_report["fault"] == env::fault_name(e.kind));
            REQUIRE(static_cast<int>(result.setup_report["actions"].size()) == e.actions);
            const Json& last = result.setup_report["actions"].back();
            CHECK(last["status"] == "FatalError");
            CHECK(last["attempts"] == 3); // == max_retries
            CHECK(last["fault"] == env::fault_name(e.kind));

            CHECK(result.evidence["capture_count"] == 0);
            CHECK(result.evidence["type_attempts"] == 0);
            CHECK(result.evidence["prompt_delivered"] == false);
            CHECK(result.evidence["investigator_deployed"] == false);

            const Json persisted = load_json_file(result.record_dir / "verdict.json");
            CHECK(persisted["environment_fault"] == env::fault_name(e.kind));
        }
    }
}
