#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specops/pipeline.hpp"

namespace specops::cli {

enum class ProviderKind { Scripted, Http };

// Operator-facing configuration. Paths inside the file resolve relative to
// the file's own directory, so a config travels with its fixtures.
struct SuiteConfig {
    ProviderKind provider = ProviderKind::Scripted;
    std::filesystem::path features_path;
    std::string agent_adapter; // display name of the adapter family
    std::int64_t seed = 0;     // shifts the logical clock epoch of every run
    int max_retries = 3;
    std::filesystem::path out_dir = "out";
    std::filesystem::path pricing_path; // optional cost table

    static SuiteConfig load(const std::filesystem::path& path);
};

struct FeatureEntry {
    std::string id;
    pipeline::RunConfig run;
};

/// Reads the features file: an array of run configurations (or an object
/// with a "features" array). Duplicate feature ids are a ConfigError.
std::vector<FeatureEntry> load_features(const std::filesystem::path& path);

/// Verdict outcome to process exit code. The only source of 0/10/20.
int exit_code_for(pipeline::RunOutcome outcome);

int cmd_run(const SuiteConfig& config, const std::string& feature_id,
            const std::optional<std::filesystem::path>& transcript_override = std::nullopt);

int cmd_suite(const SuiteConfig& config, int jobs = 1);

int cmd_report(const std::vector<std::filesystem::path>& run_dirs,
               const std::filesystem::path& annotations_dir, const std::filesystem::path& out_dir,
               const std::filesystem::path& pricing_path = {});

int run_cli(int argc, const char* const* argv);

} // namespace specops::cli
