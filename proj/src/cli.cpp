#include "specops/cli.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "CLI11.hpp"

#include "specops/errors.hpp"
#include "specops/metrics.hpp"

namespace fs = std::filesystem;

namespace specops::cli {

SuiteConfig SuiteConfig::load(const fs::path& path) {
    const Json j = load_json_file(path);
    const fs::path base = path.parent_path();
    SuiteConfig config;
    const std::string kind = j.value("provider", Json::object()).value("kind", "scripted");
    if (kind == "scripted") {
        config.provider = ProviderKind::Scripted;
    } else if (kind == "http") {
        config.provider = ProviderKind::Http;
    } else {
        throw SpecOpsError(ErrorCode::ConfigError, "unknown provider kind '" + kind + "'");
    }
    if (!j.contains("features_path")) {
        throw SpecOpsError(ErrorCode::ConfigError, "config needs features_path");
    }
    config.features_path = base / j.at("features_path").get<std::string>();
    config.agent_adapter = j.value("agent_adapter", "");
    config.seed = j.value("seed", std::int64_t{0});
    config.max_retries = j.value("max_retries", 3);
    config.out_dir = base / j.value("out_dir", "out");
    if (j.contains("pricing_path")) {
        config.pricing_path = base / j.at("pricing_path").get<std::string>();
    }
    return config;
}

std::vector<FeatureEntry> load_features(const fs::path& path) {
    const Json doc = load_json_file(path);
    if (!doc.is_array() && !doc.contains("features")) {
        throw SpecOpsError(ErrorCode::ConfigError,
                           path.string() + " has no features array");
    }
    const Json& list = doc.is_array() ? doc : doc.at("features");
    std::vector<FeatureEntry> features;
    std::set<std::string> seen;
    for (const auto& entry : list) {
        FeatureEntry fe;
        fe.run = pipeline::RunConfig::from_json(entry, path.parent_path());
        fe.id = fe.run.feature.id;
        if (!seen.insert(fe.id).second) {
            throw SpecOpsError(ErrorCode::ConfigError, "duplicate feature id '" + fe.id + "'");
        }
        features.push_back(std::move(fe));
    }
    return features;
}

int exit_code_for(pipeline::RunOutcome outcome) {
    switch (outcome) {
        case pipeline::RunOutcome::Pass: return 0;
        case pipeline::RunOutcome::BugsFound: return 10;
        case pipeline::RunOutcome::EnvironmentFailure: return 20;
    }
    return 1;
}

namespace {

std::string sanitize(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out.push_back(safe ? c : '_');
    }
    return out.empty() ? "feature" : out;
}

void require_scripted(const SuiteConfig& config) {
    if (config.provider != ProviderKind::Scripted) {
        throw SpecOpsError(ErrorCode::ConfigError,
                           "only the scripted provider is wired for local runs");
    }
}

pipeline::RunConfig effective_run(const SuiteConfig& config, const FeatureEntry& entry) {
    pipeline::RunConfig run = entry.run;
    run.max_retries = config.max_retries;
    run.start_epoch += config.seed;
    return run;
}

llm::TokenUsage usage_from_ledger(const Json& ledger) {
    llm::TokenUsage usage;
    const Json total = ledger.value("total", Json::object());
    usage.input_tokens = total.value("input_tokens", std::int64_t{0});
    usage.output_tokens = total.value("output_tokens", std::int64_t{0});
    return usage;
}

} // namespace

int cmd_run(const SuiteConfig& config, const std::string& feature_id,
            const std::optional<fs::path>& transcript_override) {
    require_scripted(config);
    const auto features = load_features(config.features_path);
    const auto it = std::find_if(features.begin(), features.end(),
                                 [&](const FeatureEntry& f) { return f.id == feature_id; });
    if (it == features.end()) {
        std::cerr << "unknown feature id '" << feature_id << "'\n";
        return 2;
    }
    pipeline::RunConfig run = effective_run(config, *it);
    if (transcript_override) run.transcript = load_json_file(*transcript_override);

    const fs::path work = config.out_dir / sanitize(feature_id);
    std::error_code ec;
    fs::remove_all(work, ec); // stale state would break record determinism

    const pipeline::RunResult result = pipeline::run_test(run, work);
    std::cout << feature_id << ": " << pipeline::run_outcome_name(result.verdict.outcome) << " ("
              << result.verdict.bugs.size() << " bug report(s))\n"
              << "record: " << result.record_dir.string() << "\n";
    return exit_code_for(result.verdict.outcome);
}

namespace {

struct SuiteRow {
    std::string feature;
    std::string outcome;
    int bugs = 0;
    bool prompt_delivered = false;
    llm::TokenUsage usage;
    std::string record;
    std::string error;
};

} // namespace

int cmd_suite(const SuiteConfig& config, int jobs) {
    require_scripted(config);
    const auto features = load_features(config.features_path);
    if (features.empty()) {
        std::cerr << config.features_path.string() << " lists no features\n";
        return 2;
    }
    if (jobs < 1) jobs = 1;
    jobs = std::min<int>(jobs, static_cast<int>(features.size()));

    std::vector<SuiteRow> rows(features.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= features.size()) return;
            SuiteRow& row = rows[i];
            row.feature = features[i].id;
            try {
                const fs::path work = config.out_dir / "runs" / sanitize(features[i].id);
                std::error_code ec;
                fs::remove_all(work, ec);
                const pipeline::RunResult result =
                    pipeline::run_test(effective_run(config, features[i]), work);
                row.outcome = pipeline::run_outcome_name(result.verdict.outcome);
                row.bugs = static_cast<int>(result.verdict.bugs.size());
                row.prompt_delivered = result.evidence.value("prompt_delivered", false);
                row.usage = usage_from_ledger(result.ledger);
                row.record = result.record_dir.string();
            } catch (const std::exception& e) {
                row.outcome = "framework_error";
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::optional<llm::PricingTable> pricing;
    if (!config.pricing_path.empty()) {
        pricing = llm::PricingTable::from_json(load_json_file(config.pricing_path));
    }

    std::map<std::string, int> outcomes;
    int total_bugs = 0;
    int delivered = 0;
    int errors = 0;
    llm::TokenUsage usage_total;
    Json runs = Json::array();
    std::vector<std::vector<std::string>> table;
    for (const auto& row : rows) {
        ++outcomes[row.outcome];
        total_bugs += row.bugs;
        if (row.prompt_delivered) ++delivered;
        if (row.outcome == "framework_error") ++errors;
        usage_total += row.usage;
        Json r;
        r["feature"] = row.feature;
        r["outcome"] = row.outcome;
        r["bugs"] = row.bugs;
        r["prompt_delivered"] = row.prompt_delivered;
        r["input_tokens"] = row.usage.input_tokens;
        r["output_tokens"] = row.usage.output_tokens;
        if (pricing) {
            r["cost_usd"] = metrics::round_places(llm::cost_estimate(row.usage, *pricing), 2);
        }
        if (!row.record.empty()) r["record"] = row.record;
        if (!row.error.empty()) r["error"] = row.error;
        runs.push_back(std::move(r));
        table.push_back({row.feature, row.outcome, std::to_string(row.bugs),
                         row.prompt_delivered ? "yes" : "no",
                         std::to_string(row.usage.input_tokens),
                         std::to_string(row.usage.output_tokens),
                         pricing ? metrics::format_metric(llm::cost_estimate(row.usage, *pricing))
                                 : "-"});
    }

    Json totals;
    totals["tests"] = rows.size();
    for (const auto& [outcome, count] : outcomes) totals[outcome] = count;
    totals["bug_reports"] = total_bugs;
    totals["prompts_delivered"] = delivered;
    totals["psr_pct"] =
        metrics::round_places(100.0 * delivered / static_cast<double>(rows.size()), 1);
    totals["input_tokens"] = usage_total.input_tokens;
    totals["output_tokens"] = usage_total.output_tokens;
    if (pricing) {
        totals["cost_usd"] = metrics::round_places(llm::cost_estimate(usage_total, *pricing), 2);
    }

    Json report;
    report["runs"] = std::move(runs);
    report["totals"] = std::move(totals);

    const std::string text = metrics::render_table(
        {"feature", "outcome", "bugs", "prompt", "input_tok", "output_tok", "cost"}, table);
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    save_json_file(config.out_dir / "suite_report.json", report);
    std::ofstream out(config.out_dir / "suite_report.txt");
    out << text;
    std::cout << text;
    return errors > 0 ? 1 : 0;
}

namespace {

struct LabelFiles {
    fs::path plan;
    fs::path steps;
    fs::path bugs;
    fs::path tests;
    fs::path hallucinations;
};

std::map<std::string, LabelFiles> discover_labels(const fs::path& dir) {
    std::map<std::string, LabelFiles> labels;
    if (dir.empty() || !fs::is_directory(dir)) return labels;
    auto ends_with = [](const std::string& s, const std::string& suffix) {
        return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        auto claim = [&](const char* suffix, fs::path LabelFiles::* slot) {
            if (!ends_with(name, suffix)) return false;
            const std::string label = name.substr(0, name.size() - std::string(suffix).size());
            labels[label].*slot = entry.path();
            return true;
        };
        claim(".plan.json", &LabelFiles::plan) || claim(".steps.jsonl", &LabelFiles::steps) ||
            claim(".bugs.jsonl", &LabelFiles::bugs) || claim(".tests.json", &LabelFiles::tests) ||
            claim(".hallucinations.jsonl", &LabelFiles::hallucinations);
    }
    return labels;
}

std::vector<std::string> unknown_row(const std::string& label, std::size_t cells) {
    std::vector<std::string> row{label};
    row.insert(row.end(), cells, "?");
    return row;
}

} // namespace

int cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& annotations_dir,
               const fs::path& out_dir, const fs::path& pricing_path) {
    Json report;

    std::optional<llm::PricingTable> pricing;
    if (!pricing_path.empty()) {
        pricing = llm::PricingTable::from_json(load_json_file(pricing_path));
    }

    Json runs = Json::array();
    std::map<std::string, int> outcomes;
    llm::TokenUsage usage_total;
    for (const auto& dir : run_dirs) {
        const fs::path record = fs::exists(dir / "verdict.json") ? dir : dir / "record";
        if (!fs::exists(record / "verdict.json")) {
            throw SpecOpsError(ErrorCode::ConfigError, "no verdict.json under " + dir.string());
        }
        const Json verdict = load_json_file(record / "verdict.json");
        const std::string outcome = verdict.value("outcome", "unknown");
        ++outcomes[outcome];
        llm::TokenUsage usage;
        if (fs::exists(record / "ledger.json")) {
            usage = usage_from_ledger(load_json_file(record / "ledger.json"));
            usage_total += usage;
        }
        Json r;
        r["dir"] = dir.string();
        r["outcome"] = outcome;
        r["bugs"] = verdict.value("bugs", Json::array()).size();
        r["input_tokens"] = usage.input_tokens;
        r["output_tokens"] = usage.output_tokens;
        runs.push_back(std::move(r));
    }
    report["runs"] = std::move(runs);
    Json run_totals;
    for (const auto& [outcome, count] : outcomes) run_totals[outcome] = count;
    run_totals["input_tokens"] = usage_total.input_tokens;
    run_totals["output_tokens"] = usage_total.output_tokens;
    if (pricing) {
        run_totals["cost_usd"] =
            metrics::round_places(llm::cost_estimate(usage_total, *pricing), 2);
    }
    report["run_totals"] = std::move(run_totals);

    const auto labels = discover_labels(annotations_dir);

    std::vector<std::string> planning_headers{"suite"};
    for (metrics::StepPhase p : metrics::kAllStepPhases) {
        const std::string name = metrics::step_phase_name(p);
        planning_headers.push_back(name + " inc");
        planning_headers.push_back(name + " inc%");
        planning_headers.push_back(name + " miss");
    }
    std::vector<std::string> execution_headers{"suite"};
    for (metrics::StepPhase p : metrics::kAllStepPhases) {
        execution_headers.push_back(metrics::step_phase_name(p));
    }
    const std::vector<std::string> bug_headers{"suite", "triggered", "TP",     "FP", "FN",
                                               "excl",  "precision", "recall", "F1", "PSR"};
    std::vector<std::string> hallucination_headers{"suite"};
    for (metrics::HallucinationCategory c : metrics::kAllHallucinationCategories) {
        hallucination_headers.push_back(metrics::hallucination_category_name(c));
    }
    hallucination_headers.push_back("total");

    std::vector<std::vector<std::string>> planning_rows;
    std::vector<std::vector<std::string>> execution_rows;
    std::vector<std::vector<std::string>> bug_rows;
    std::vector<std::vector<std::string>> hallucination_rows;
    Json planning_json = Json::object();
    Json execution_json = Json::object();
    Json bugs_json = Json::object();
    Json hallucinations_json = Json::object();

    for (const auto& [label, files] : labels) {
        if (!files.plan.empty() && !files.steps.empty()) {
            const auto steps = metrics::discretize(load_json_file(files.plan));
            const auto annotations =
                metrics::parse_step_annotations(read_text_file(files.steps));
            const metrics::PlanningScore planning = metrics::score_planning(steps, annotations);
            const metrics::ExecutionScore execution = metrics::score_execution(steps, annotations);
            std::vector<std::string> prow{label};
            std::vector<std::string> erow{label};
            for (metrics::StepPhase p : metrics::kAllStepPhases) {
                const auto& pp = planning.phases.at(p);
                prow.push_back(std::to_string(pp.incorrect));
                prow.push_back(metrics::format_pct(pp.incorrect_pct()));
                prow.push_back(std::to_string(pp.missing));
                erow.push_back(metrics::format_ratio(execution.phases.at(p)));
            }
            planning_rows.push_back(std::move(prow));
            execution_rows.push_back(std::move(erow));
            planning_json[label] = planning.to_json();
            execution_json[label] = execution.to_json();
        } else {
            planning_rows.push_back(unknown_row(label, planning_headers.size() - 1));
            execution_rows.push_back(unknown_row(label, execution_headers.size() - 1));
            planning_json[label] = nullptr;
            execution_json[label] = nullptr;
        }

        if (!files.bugs.empty()) {
            const auto bug_labels = metrics::parse_bug_labels(read_text_file(files.bugs));
            metrics::TestCensus census;
            const bool census_known = !files.tests.empty();
            if (census_known) {
                const Json t = load_json_file(files.tests);
                census.total = t.value("total", 0);
                census.successful_prompts = t.value("successful_prompts", 0);
            }
            const metrics::ConfusionMetrics m = metrics::bug_confusion(bug_labels, census);
            bug_rows.push_back({label, std::to_string(m.bugs_triggered()), std::to_string(m.tp),
                                std::to_string(m.fp), std::to_string(m.fn),
                                std::to_string(m.excluded_fps),
                                metrics::format_metric(m.precision()),
                                metrics::format_metric(m.recall()),
                                metrics::format_metric(m.f1()),
                                census_known ? metrics::format_pct(m.psr_pct()) : "?"});
            Json mj = m.to_json();
            if (!census_known) mj["psr_pct"] = nullptr;
            bugs_json[label] = std::move(mj);
        } else {
            bug_rows.push_back(unknown_row(label, bug_headers.size() - 1));
            bugs_json[label] = nullptr;
        }

        if (!files.hallucinations.empty()) {
            const auto tags =
                metrics::parse_hallucination_tags(read_text_file(files.hallucinations));
            const metrics::HallucinationReport h = metrics::hallucination_report(tags);
            std::vector<std::string> hrow{label};
            for (metrics::HallucinationCategory c : metrics::kAllHallucinationCategories) {
                hrow.push_back(std::to_string(h.counts.at(c)));
            }
            hrow.push_back(std::to_string(h.total));
            hallucination_rows.push_back(std::move(hrow));
            hallucinations_json[label] = h.to_json();
        } else {
            hallucination_rows.push_back(unknown_row(label, hallucination_headers.size() - 1));
            hallucinations_json[label] = nullptr;
        }
    }

    Json tables;
    tables["planning"] = std::move(planning_json);
    tables["execution"] = std::move(execution_json);
    tables["bugs"] = std::move(bugs_json);
    tables["hallucinations"] = std::move(hallucinations_json);
    report["tables"] = std::move(tables);

    std::string text;
    text += "Planned-step quality\n";
    text += metrics::render_table(planning_headers, planning_rows);
    text += "\nStep execution success\n";
    text += metrics::render_table(execution_headers, execution_rows);
    text += "\nBug detection\n";
    text += metrics::render_table(bug_headers, bug_rows);
    text += "\nHallucinations\n";
    text += metrics::render_table(hallucination_headers, hallucination_rows);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw SpecOpsError(ErrorCode::IoError, "cannot create " + out_dir.string());
    save_json_file(out_dir / "report.json", report);
    std::ofstream out(out_dir / "report.txt");
    out << text;
    std::cout << text;
    return 0;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"scripted end-to-end testing for computer-use agents"};
    app.require_subcommand(1);

    std::string config_path;
    std::string feature_id;
    std::string out_override;
    std::int64_t seed_override = 0;
    std::string transcript_path;
    int retries_override = 0;
    int jobs = 1;

    CLI::App* run_cmd =
        app.add_subcommand("run", "generate, set up, execute and validate one feature");
    run_cmd->add_option("--config", config_path, "suite configuration file")
        ->envname("SPECOPS_CONFIG")
        ->required();
    run_cmd->add_option("--feature", feature_id, "feature id from the features file")->required();
    CLI::Option* run_out =
        run_cmd->add_option("--out", out_override, "output directory override")
            ->envname("SPECOPS_OUT");
    CLI::Option* run_seed =
        run_cmd->add_option("--seed", seed_override, "logical clock offset")
            ->envname("SPECOPS_SEED");
    CLI::Option* run_transcript =
        run_cmd->add_option("--transcript", transcript_path, "replacement provider transcript")
            ->envname("SPECOPS_TRANSCRIPT");
    CLI::Option* run_retries =
        run_cmd->add_option("--max-retries", retries_override, "tool retry budget override")
            ->envname("SPECOPS_MAX_RETRIES");

    CLI::App* suite_cmd = app.add_subcommand("suite", "run every feature and aggregate a report");
    suite_cmd->add_option("--config", config_path, "suite configuration file")
        ->envname("SPECOPS_CONFIG")
        ->required();
    CLI::Option* suite_out =
        suite_cmd->add_option("--out", out_override, "output directory override")
            ->envname("SPECOPS_OUT");
    CLI::Option* suite_seed =
        suite_cmd->add_option("--seed", seed_override, "logical clock offset")
            ->envname("SPECOPS_SEED");
    CLI::Option* suite_retries =
        suite_cmd->add_option("--max-retries", retries_override, "tool retry budget override")
            ->envname("SPECOPS_MAX_RETRIES");
    suite_cmd->add_option("--jobs", jobs, "parallel runs")->envname("SPECOPS_JOBS");

    CLI::App* report_cmd =
        app.add_subcommand("report", "render metrics tables from run records and annotations");
    std::vector<std::string> dirs;
    std::string annotations_dir;
    std::string report_out = "report";
    std::string pricing_arg;
    report_cmd->add_option("dirs", dirs, "run directories to summarize");
    report_cmd->add_option("--annotations", annotations_dir, "annotation files directory");
    report_cmd->add_option("--out", report_out, "report output directory")->envname("SPECOPS_OUT");
    report_cmd->add_option("--pricing", pricing_arg, "token pricing table")
        ->envname("SPECOPS_PRICING");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(run_cmd)) {
            SuiteConfig config = SuiteConfig::load(config_path);
            if (!run_out->empty()) config.out_dir = out_override;
            if (!run_seed->empty()) config.seed = seed_override;
            if (!run_retries->empty()) config.max_retries = retries_override;
            std::optional<fs::path> transcript;
            if (!run_transcript->empty()) transcript = fs::path(transcript_path);
            return cmd_run(config, feature_id, transcript);
        }
        if (app.got_subcommand(suite_cmd)) {
            SuiteConfig config = SuiteConfig::load(config_path);
            if (!suite_out->empty()) config.out_dir = out_override;
            if (!suite_seed->empty()) config.seed = seed_override;
            if (!suite_retries->empty()) config.max_retries = retries_override;
            return cmd_suite(config, jobs);
        }
        std::vector<fs::path> run_dirs(dirs.begin(), dirs.end());
        return cmd_report(run_dirs, annotations_dir, report_out, pricing_arg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace specops::cli
