#pragma once

#include "winop/features.hpp"
#include "winop/metrics.hpp"
#include "winop/ocsvm.hpp"
#include "winop/st_detector.hpp"
#include "winop/sweep.hpp"
#include "winop/synthgen.hpp"
#include "winop/timeseries.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace winop {

/// Everything that determines a run's outputs besides the input files.
/// Each subcommand writes the resolved form to run_config.json.
struct RunConfig {
    std::string command;
    std::string logger;
    std::string weather;
    std::string truth;
    std::string predicted;
    std::vector<std::string> runs;
    std::string method = "st";  // st | svm
    std::string features = "T_meas";
    StConfig st;
    Normalization normalization = Normalization::zscore;
    OcsvmParams svm;
    OutlierMapping mapping = OutlierMapping::automatic;
    EnumerationPolicy policy;
    MatchOptions matching;
    std::optional<std::int64_t> step_seconds;  // unset: the logger's median cadence
    ResampleOptions resample;
    std::string output;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string preset;
    std::optional<ScenarioConfig> scenario;
};

[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& config);

/// Overlays the keys present in `j` onto `base`. Unknown keys are errors so
/// a misspelt option cannot be silently ignored.
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

[[nodiscard]] nlohmann::ordered_json to_json(const ScenarioConfig& config);
[[nodiscard]] ScenarioConfig scenario_from_json(const nlohmann::json& j, ScenarioConfig base = {});

[[nodiscard]] nlohmann::ordered_json to_json(const MetricsReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const StDiagnostics& diagnostics);
[[nodiscard]] nlohmann::ordered_json to_json(const MetricSummary& summary);

/// Pretty-printed with a trailing newline.
[[nodiscard]] std::string dump(const nlohmann::ordered_json& j);

[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace winop
