#include "doctest.h"

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specops/errors.hpp"
#include "specops/metrics.hpp"

#include "support/rng.hpp"

using namespace specops;
using namespace specops::metrics;

namespace {

std::vector<StepAnnotation> annotate_all_ok(const std::vector<DiscretizedStep>& steps) {
    std::vector<StepAnnotation> out;
    for (const auto& s : steps) {
        StepAnnotation a;
        a.step_id = s.id;
        out.push_back(a);
    }
    return out;
}

StepAnnotation* find_annotation(std::vector<StepAnnotation>& all, const std::string& id) {
    for (auto& a : all) {
        if (a.step_id == id) return &a;
    }
    return nullptr;
}

std::vector<BugLabel> make_labels(int tp, int fp_successful, int fp_unsuccessful, int fn) {
    std::vector<BugLabel> labels;
    int serial = 0;
    auto add = [&](BugLabelKind kind, bool prompt_ok) {
        BugLabel label;
        label.report_id = "r" + std::to_string(++serial);
        label.label = kind;
        label.prompt_successful = prompt_ok;
        labels.push_back(label);
    };
    for (int i = 0; i < tp; ++i) add(BugLabelKind::TP, true);
    for (int i = 0; i < fp_successful; ++i) add(BugLabelKind::FP, true);
    for (int i = 0; i < fp_unsuccessful; ++i) add(BugLabelKind::FP, false);
    for (int i = 0; i < fn; ++i) add(BugLabelKind::FN, true);
    return labels;
}

} // namespace

TEST_SUITE("command_chains") {
    TEST_CASE("splits on the five separators, respecting quotes") {
        CHECK(split_command_chain("ls") == std::vector<std::string>{"ls"});
        CHECK(split_command_chain("cd /tmp && ls -la") ==
              std::vector<std::string>{"cd /tmp", "ls -la"});
        CHECK(split_command_chain("a || b; c | d & e") ==
              std::vector<std::string>{"a", "b", "c", "d", "e"});
        CHECK(split_command_chain("echo 'a && b' && echo done") ==
              std::vector<std::string>{"echo 'a && b'", "echo done"});
        CHECK(split_command_chain("echo \"it's | quoted\" ; next") ==
              std::vector<std::string>{"echo \"it's | quoted\"", "next"});
        CHECK(split_command_chain(";; a ;;") == std::vector<std::string>{"a"});
        CHECK(split_command_chain("").empty());
        CHECK(split_command_chain("   ").empty());
    }

    TEST_CASE("agrees with a constructive oracle on random chains") {
        testsupport::Rng rng(0x5eed0007);
        const std::vector<std::string> pieces = {
            "ls", "grep -r pat", "'a && b'", "\"x | y; z\"", "cat file.txt", "true",
        };
        const std::vector<std::string> seps = {" && ", " || ", " ; ", " | ", " & ",
                                               "&&",   ";",    "|"};
        for (int round = 0; round < 200; ++round) {
            const int count = rng.range(1, 6);
            std::vector<std::string> expected;
            std::string command;
            for (int i = 0; i < count; ++i) {
                std::string segment = pieces[rng.below(pieces.size())];
                if (rng.chance(40)) segment += " " + pieces[rng.below(pieces.size())];
                expected.push_back(segment);
                if (i > 0) command += seps[rng.below(seps.size())];
                command += segment;
            }
            CHECK(split_command_chain(command) == expected);
        }
    }
}

TEST_SUITE("discretize") {
    TEST_CASE("per-kind step emission") {
        Json plan = Json::array();
        plan.push_back(Json{{"id", "m1"},
                            {"phase", "setup"},
                            {"kind", "email"},
                            {"to", "alex@x.test"},
                            {"subject", "Plan"},
                            {"attachments", Json::array({"a.pdf", "b.xlsx"})}});
        plan.push_back(Json{{"id", "f1"},
                            {"phase", "setup"},
                            {"kind", "file"},
                            {"path", "notes.txt"},
                            {"content", "hello"}});
        plan.push_back(Json{{"id", "f2"}, {"phase", "setup"}, {"kind", "file"}, {"path", "empty.txt"}});
        plan.push_back(Json{{"id", "d1"}, {"phase", "setup"}, {"kind", "mkdir"}, {"path", "work"}});
        plan.push_back(Json{{"id", "t1"},
                            {"phase", "execution"},
                            {"kind", "terminal"},
                            {"command", "mkdir out && cp a out | tee log"}});
        plan.push_back(Json{{"id", "n1"},
                            {"phase", "execution"},
                            {"kind", "navigation"},
                            {"transitions", Json::array({"inbox", "compose"})}});
        plan.push_back(Json{{"id", "x1"},
                            {"phase", "validation"},
                            {"kind", "data_extraction"},
                            {"items", Json::array({"total", "date", "sender"})}});
        plan.push_back(Json{{"id", "s1"},
                            {"phase", "validation"},
                            {"kind", "natural_language"},
                            {"statements", Json::array({"The reply quotes the numbers."})}});

        const auto steps = discretize(plan);
        REQUIRE(steps.size() == 6 + 2 + 1 + 1 + 3 + 2 + 3 + 1);

        CHECK(steps[0].id == "m1#1");
        CHECK(steps[0].kind == StepKind::EmailCreation);
        CHECK(steps[0].text == "set the recipient to alex@x.test");
        CHECK(steps[1].text == "set the subject to \"Plan\"");
        CHECK(steps[2].text == "compose the message body");
        CHECK(steps[3].text == "send the email");
        CHECK(steps[4].kind == StepKind::AttachmentAdd);
        CHECK(steps[4].text == "attach a.pdf");
        CHECK(steps[5].id == "m1#6");

        CHECK(steps[6].kind == StepKind::FileCreateWithContent);
        CHECK(steps[7].text == "populate notes.txt");
        CHECK(steps[8].kind == StepKind::FileTouchOrMkdir);
        CHECK(steps[8].text == "create empty file empty.txt");
        CHECK(steps[9].text == "create directory work");

        CHECK(steps[10].kind == StepKind::TerminalCommand);
        CHECK(steps[10].text == "run `mkdir out`");
        CHECK(steps[11].text == "run `cp a out`");
        CHECK(steps[12].text == "run `tee log`");

        CHECK(steps[13].text == "navigate to inbox");
        CHECK(steps[15].kind == StepKind::DataExtraction);
        CHECK(steps[15].text == "extract total");
        CHECK(steps[18].kind == StepKind::NaturalLanguage);
        CHECK(steps[18].text == "The reply quotes the numbers.");
        CHECK(steps[18].phase == StepPhase::Validation);

        const Json j = steps[0].to_json();
        CHECK(j["id"] == "m1#1");
        CHECK(j["phase"] == "setup");
        CHECK(j["kind"] == "email_creation");
        CHECK(j["source_ref"] == "m1");
    }

    TEST_CASE("unclassifiable elements are surfaced, never guessed") {
        auto one = [](Json element) {
            return discretize(Json::array({std::move(element)}));
        };
        CHECK_THROWS_WITH_AS(one(Json{{"id", "z"}, {"phase", "setup"}}),
                             "ClassificationRequired: plan element z has no kind", SpecOpsError);
        CHECK_THROWS_AS(one(Json{{"id", "z"}, {"kind", "email"}}), SpecOpsError);
        CHECK_THROWS_AS(one(Json{{"id", "z"}, {"phase", "setup"}, {"kind", "telepathy"}}),
                        SpecOpsError);
        CHECK_THROWS_AS(one(Json{{"id", "z"}, {"phase", "later"}, {"kind", "mkdir"}}),
                        SpecOpsError);
        CHECK_THROWS_AS(one(Json{{"id", "z"}, {"phase", "setup"}, {"kind", "file"}}),
                        SpecOpsError);

        // object wrapper and default ids
        const auto steps = discretize(
            Json{{"elements", Json::array({Json{{"phase", "setup"}, {"kind", "mkdir"},
                                                {"path", "w"}}})}});
        REQUIRE(steps.size() == 1);
        CHECK(steps[0].id == "e1#1");
    }

    TEST_CASE("step counts match an independent per-kind oracle on random plans") {
        testsupport::Rng rng(0x5eed0008);
        const char* phases[] = {"setup", "execution", "validation", "cleanup"};
        for (int round = 0; round < 40; ++round) {
            Json plan = Json::array();
            std::size_t expected = 0;
            const int elements = rng.range(1, 8);
            for (int i = 0; i < elements; ++i) {
                Json e;
                e["id"] = "p" + std::to_string(i);
                e["phase"] = phases[rng.below(4)];
                switch (rng.below(7)) {
                    case 0: {
                        const int attach = rng.range(0, 3);
                        e["kind"] = "email";
                        e["to"] = "a@b";
                        e["subject"] = "s";
                        Json arr = Json::array();
                        for (int k = 0; k < attach; ++k) arr.push_back("f" + std::to_string(k));
                        e["attachments"] = arr;
                        expected += 4 + static_cast<std::size_t>(attach);
                        break;
                    }
                    case 1:
                        e["kind"] = "file";
                        e["path"] = "p.txt";
                        if (rng.chance(50)) {
                            e["content"] = "x";
                            expected += 2;
                        } else {
                            expected += 1;
                        }
                        break;
                    case 2:
                        e["kind"] = "mkdir";
                        e["path"] = "d";
                        expected += 1;
                        break;
                    case 3: {
                        const int segs = rng.range(1, 4);
                        std::string cmd;
                        for (int k = 0; k < segs; ++k) {
                            if (k > 0) cmd += (k % 2 == 0) ? " && " : " ; ";
                            cmd += "cmd" + std::to_string(k);
                        }
                        e["kind"] = "terminal";
                        e["command"] = cmd;
                        expected += static_cast<std::size_t>(segs);
                        break;
                    }
                    case 4: {
                        const int n = rng.range(0, 3);
                        Json arr = Json::array();
                        for (int k = 0; k < n; ++k) arr.push_back("page" + std::to_string(k));
                        e["kind"] = "navigation";
                        e["transitions"] = arr;
                        expected += static_cast<std::size_t>(n);
                        break;
                    }
                    case 5: {
                        const int n = rng.range(1, 4);
                        Json arr = Json::array();
                        for (int k = 0; k < n; ++k) arr.push_back("field" + std::to_string(k));
                        e["kind"] = "data_extraction";
                        e["items"] = arr;
                        expected += static_cast<std::size_t>(n);
                        break;
                    }
                    default: {
                        const int n = rng.range(1, 3);
                        Json arr = Json::array();
                        for (int k = 0; k < n; ++k) arr.push_back("statement " + std::to_string(k));
                        e["kind"] = "natural_language";
                        e["statements"] = arr;
                        expected += static_cast<std::size_t>(n);
                        break;
                    }
                }
                plan.push_back(std::move(e));
            }
            const auto steps = discretize(plan);
            CHECK(steps.size() == expected);
            // per-element ordinals restart at 1 and stay contiguous
            std::string last_ref;
            int last_ordinal = 0;
            for (const auto& s : steps) {
                const auto hash = s.id.find('#');
                const std::string ref = s.id.substr(0, hash);
                const int ordinal = std::stoi(s.id.substr(hash + 1));
                if (ref != last_ref) {
                    CHECK(ordinal == 1);
                    last_ref = ref;
                } else {
                    CHECK(ordinal == last_ordinal + 1);
                }
                last_ordinal = ordinal;
                CHECK(s.source_ref == ref);
            }
        }
    }
}

TEST_SUITE("annotations") {
    TEST_CASE("jsonl parsing skips blanks and pins malformed lines") {
        const std::string text =
            "{\"step\":\"a#1\",\"executed_ok\":false}\n"
            "\n"
            "   \n"
            "{\"step\":\"a#2\",\"dependency\":\"a#1\"}\n";
        const auto parsed = parse_step_annotations(text);
        REQUIRE(parsed.size() == 2);
        CHECK(parsed[0].step_id == "a#1");
        CHECK_FALSE(parsed[0].executed_ok);
        CHECK(parsed[1].dependency == "a#1");

        try {
            parse_step_annotations("{\"step\":\"x\"}\nnot json\n");
            FAIL("expected a parse failure");
        } catch (const SpecOpsError& e) {
            CHECK(e.code() == ErrorCode::InvalidAnnotation);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }

        StepAnnotation a;
        a.step_id = "m#1";
        a.phase = StepPhase::Cleanup;
        a.missing = true;
        a.dependency = "m#0";
        const StepAnnotation back = StepAnnotation::from_json(a.to_json());
        CHECK(back.phase == StepPhase::Cleanup);
        CHECK(back.missing);
        CHECK(back.dependency == "m#0");
    }

    TEST_CASE("planning scores count incorrect and missing per phase") {
        const Json plan = Json::array({
            Json{{"id", "a"}, {"phase", "setup"}, {"kind", "mkdir"}, {"path", "d"}},
            Json{{"id", "b"}, {"phase", "execution"}, {"kind", "terminal"}, {"command", "x && y"}},
        });
        const auto steps = discretize(plan);
        auto annotations = annotate_all_ok(steps);
        find_annotation(annotations, "b#1")->planned_correct = false;

        StepAnnotation missing;
        missing.step_id = "ghost#1";
        missing.missing = true;
        missing.phase = StepPhase::Execution;
        annotations.push_back(missing);

        const PlanningScore score = score_planning(steps, annotations);
        CHECK(score.phases.at(StepPhase::Setup).total == 1);
        CHECK(score.phases.at(StepPhase::Setup).incorrect == 0);
        CHECK(score.phases.at(StepPhase::Execution).total == 2);
        CHECK(score.phases.at(StepPhase::Execution).incorrect == 1);
        CHECK(score.phases.at(StepPhase::Execution).missing == 1);
        CHECK(score.phases.at(StepPhase::Execution).incorrect_pct() == doctest::Approx(50.0));
        CHECK(score.phases.at(StepPhase::Cleanup).total == 0);
        CHECK_FALSE(score.phases.at(StepPhase::Cleanup).incorrect_pct().has_value());

        const Json j = score.to_json();
        CHECK(j["phases"]["execution"]["incorrect_pct"] == 50.0);
        CHECK(j["phases"]["cleanup"]["incorrect_pct"].is_null());
    }

    TEST_CASE("annotation bookkeeping is strict") {
        const Json plan = Json::array(
            {Json{{"id", "a"}, {"phase", "setup"}, {"kind", "mkdir"}, {"path", "d"}}});
        const auto steps = discretize(plan);

        CHECK_THROWS_AS(score_planning(steps, {}), SpecOpsError); // unannotated

        auto dup = annotate_all_ok(steps);
        dup.push_back(dup[0]);
        CHECK_THROWS_AS(score_planning(steps, dup), SpecOpsError);

        auto unknown = annotate_all_ok(steps);
        StepAnnotation stray;
        stray.step_id = "nope#1";
        unknown.push_back(stray);
        CHECK_THROWS_AS(score_planning(steps, unknown), SpecOpsError);

        auto missing_no_phase = annotate_all_ok(steps);
        StepAnnotation m;
        m.step_id = "extra#1";
        m.missing = true; // no phase given
        missing_no_phase.push_back(m);
        CHECK_THROWS_AS(score_planning(steps, missing_no_phase), SpecOpsError);

        auto missing_but_present = annotate_all_ok(steps);
        StepAnnotation p;
        p.step_id = "a#1";
        p.missing = true;
        p.phase = StepPhase::Setup;
        missing_but_present.push_back(p);
        CHECK_THROWS_AS(score_planning(steps, missing_but_present), SpecOpsError);
    }

    TEST_CASE("execution scoring propagates failures along dependencies") {
        const Json plan = Json::array({
            Json{{"id", "t"}, {"phase", "execution"}, {"kind", "terminal"},
                 {"command", "a; b; c; d"}},
        });
        const auto steps = discretize(plan); // t#1..t#4
        auto annotations = annotate_all_ok(steps);
        find_annotation(annotations, "t#1")->executed_ok = false;
        find_annotation(annotations, "t#2")->dependency = "t#1"; // flips
        find_annotation(annotations, "t#3")->dependency = "t#2"; // flips transitively
        // t#4 has no dependency and stays successful

        const ExecutionScore score = score_execution(steps, annotations);
        CHECK(score.phases.at(StepPhase::Execution).total == 4);
        CHECK(score.phases.at(StepPhase::Execution).succeeded == 1);
        REQUIRE(score.corrections.size() == 2);
        CHECK(score.corrections[0].find("t#2") != std::string::npos);
        CHECK(score.corrections[1].find("t#3") != std::string::npos);
        CHECK(score.phases.at(StepPhase::Execution).success_pct() == doctest::Approx(25.0));
        CHECK(score.to_json()["phases"]["execution"]["display"] == "25.0% (1/4)");

        // an already-failed dependent is not double-corrected
        auto twice = annotate_all_ok(steps);
        find_annotation(twice, "t#1")->executed_ok = false;
        find_annotation(twice, "t#2")->executed_ok = false;
        find_annotation(twice, "t#2")->dependency = "t#1";
        CHECK(score_execution(steps, twice).corrections.empty());

        auto cyclic = annotate_all_ok(steps);
        find_annotation(cyclic, "t#1")->dependency = "t#2";
        find_annotation(cyclic, "t#2")->dependency = "t#1";
        CHECK_THROWS_AS(score_execution(steps, cyclic), SpecOpsError);

        auto dangling = annotate_all_ok(steps);
        find_annotation(dangling, "t#1")->dependency = "t#9";
        CHECK_THROWS_AS(score_execution(steps, dangling), SpecOpsError);
    }
}

TEST_SUITE("bug_confusion") {
    TEST_CASE("counts, exclusions and the labeling invariants") {
        const auto labels = make_labels(3, 2, 4, 1);
        const ConfusionMetrics m = bug_confusion(labels, {10, 6});
        CHECK(m.tp == 3);
        CHECK(m.fp == 6); // headline FP includes the unsuccessful-prompt ones
        CHECK(m.excluded_fps == 4);
        CHECK(m.fn == 1);
        CHECK(m.bugs_triggered() == 4);
        CHECK(m.tests_total == 10);
        CHECK(m.psr_pct() == doctest::Approx(60.0));

        BugLabel env_tp;
        env_tp.report_id = "bad";
        env_tp.label = BugLabelKind::TP;
        env_tp.env_setup_caused = true;
        CHECK_THROWS_AS(bug_confusion({env_tp}, {1, 1}), SpecOpsError);

        BugLabel unsuccessful_tp;
        unsuccessful_tp.report_id = "bad2";
        unsuccessful_tp.label = BugLabelKind::TP;
        unsuccessful_tp.prompt_successful = false;
        CHECK_THROWS_AS(bug_confusion({unsuccessful_tp}, {1, 0}), SpecOpsError);

        CHECK_THROWS_AS(bug_confusion({}, {5, 6}), SpecOpsError); // census out of range

        const Json j = m.to_json();
        CHECK(j["tp"] == 3);
        CHECK(j["excluded_fps"] == 4);
        CHECK(j["psr_pct"] == 60.0);

        BugLabel round;
        round.report_id = "r";
        round.label = BugLabelKind::FN;
        const BugLabel back = BugLabel::from_json(round.to_json());
        CHECK(back.label == BugLabelKind::FN);
        CHECK(bug_label_from_name("tp") == BugLabelKind::TP);
        CHECK_THROWS_AS(bug_label_from_name("tn"), SpecOpsError);
    }

    TEST_CASE("headline aggregates reproduce the published detector profile") {
        // strong detector: almost everything right, every prompt lands
        const ConfusionMetrics strong = bug_confusion(make_labels(164, 15, 0, 26), {99, 99});
        CHECK(strong.to_json()["precision"] == 0.92);
        CHECK(strong.to_json()["recall"] == 0.86);
        CHECK(strong.to_json()["f1"] == 0.89);
        CHECK(strong.to_json()["psr_pct"] == 100.0);

        // noisy detector: many false alarms, half the prompts never landed
        const ConfusionMetrics noisy = bug_confusion(make_labels(13, 29, 29, 31), {99, 49});
        CHECK(noisy.fp == 58);
        CHECK(noisy.excluded_fps == 29);
        CHECK(noisy.to_json()["precision"] == 0.18);
        CHECK(noisy.to_json()["recall"] == 0.30);
        CHECK(noisy.to_json()["f1"] == 0.23);
        CHECK(noisy.to_json()["psr_pct"] == 49.5);

        // silent detector: nothing reported at all
        const ConfusionMetrics silent = bug_confusion(make_labels(0, 0, 0, 11), {99, 11});
        CHECK_FALSE(silent.precision().has_value());
        CHECK(silent.recall() == doctest::Approx(0.0));
        CHECK_FALSE(silent.f1().has_value());
        CHECK(silent.to_json()["precision"].is_null());
        CHECK(silent.to_json()["psr_pct"] == 11.1);
        CHECK(format_metric(silent.precision()) == "-");
    }
}

TEST_SUITE("hallucinations") {
    TEST_CASE("tags parse and tally with every category present") {
        const std::string jsonl =
            "{\"category\":\"ui\",\"ref\":\"fail-1\"}\n"
            "{\"category\":\"ui\",\"ref\":\"fail-2\"}\n"
            "{\"category\":\"false_validation\",\"ref\":\"fail-3\"}\n";
        const auto tags = parse_hallucination_tags(jsonl);
        REQUIRE(tags.size() == 3);
        CHECK(tags[0].category == HallucinationCategory::Ui);

        const HallucinationReport report = hallucination_report(tags);
        CHECK(report.total == 3);
        CHECK(report.counts.at(HallucinationCategory::Ui) == 2);
        CHECK(report.counts.at(HallucinationCategory::FalseValidation) == 1);
        CHECK(report.counts.at(HallucinationCategory::Algorithmic) == 0);
        CHECK(report.counts.size() == 6);

        const Json j = report.to_json();
        CHECK(j["ui"] == 2);
        CHECK(j["input_conflicting"] == 0);
        CHECK(j["total"] == 3);

        CHECK_THROWS_AS(parse_hallucination_tags("{\"category\":\"psychic\"}\n"), SpecOpsError);
        for (HallucinationCategory c : kAllHallucinationCategories) {
            CHECK(hallucination_category_from_name(hallucination_category_name(c)) == c);
        }
    }
}

TEST_SUITE("formatting") {
    TEST_CASE("rounding is half away from zero at fixed places") {
        CHECK(round_places(0.125, 2) == doctest::Approx(0.13));
        CHECK(round_places(-0.125, 2) == doctest::Approx(-0.13));
        CHECK(round_places(95.95, 1) == doctest::Approx(96.0));
        CHECK(round_places(96.04, 1) == doctest::Approx(96.0));
        CHECK(round_places(0.885, 2) == doctest::Approx(0.89));

        CHECK(format_pct(std::nullopt) == "--");
        CHECK(format_pct(96.0371) == "96.0%");
        CHECK(format_metric(std::nullopt) == "-");
        CHECK(format_metric(0.916201) == "0.92");

        PhaseExecution none;
        CHECK(format_ratio(none) == "--");
        PhaseExecution some;
        some.total = 1615;
        some.succeeded = 1551;
        CHECK(format_ratio(some) == "96.0% (1551/1615)");
    }

    TEST_CASE("tables align columns under a dashed rule") {
        const std::string table = render_table({"name", "value"}, {{"a", "1"}, {"longer", "22"}});
        CHECK(table ==
              "name    value\n"
              "------  -----\n"
              "a       1\n"
              "longer  22\n");
    }

    TEST_CASE("canned tables carry the formatted cells") {
        ConfusionMetrics m = bug_confusion(make_labels(164, 15, 0, 26), {99, 99});
        const std::string confusion = render_confusion_table({{"detector", m}});
        CHECK(confusion.find("precision") != std::string::npos);
        CHECK(confusion.find("0.92") != std::string::npos);
        CHECK(confusion.find("100.0%") != std::string::npos);

        const Json plan = Json::array(
            {Json{{"id", "a"}, {"phase", "setup"}, {"kind", "mkdir"}, {"path", "d"}}});
        const auto steps = discretize(plan);
        const ExecutionScore exec = score_execution(steps, annotate_all_ok(steps));
        const std::string table = render_execution_table({{"suite-a", exec}});
        CHECK(table.find("Setup") != std::string::npos);
        CHECK(table.find("100.0% (1/1)") != std::string::npos);
        // phases with no data stay out of the table
        CHECK(table.find("Cleanup") == std::string::npos);

        PlanningScore plan_score = score_planning(steps, annotate_all_ok(steps));
        const std::string planning = render_planning_table({{"suite-a", plan_score}});
        CHECK(planning.find("Setup inc%") != std::string::npos);
        CHECK(planning.find("0.0%") != std::string::npos);

        const std::string hall =
            render_hallucination_table({{"suite-a", hallucination_report({})}});
        CHECK(hall.find("false_validation") != std::string::npos);
        CHECK(hall.find("total") != std::string::npos);
    }
}
