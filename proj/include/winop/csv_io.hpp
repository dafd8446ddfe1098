#pragma once

#include "winop/dataset.hpp"
#include "winop/metrics.hpp"
#include "winop/st_detector.hpp"
#include "winop/timeseries.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace winop {

/// ISO-8601 UTC, e.g. 2023-07-20T00:00:00Z.
[[nodiscard]] std::string format_timestamp(TimePoint t);

/// Accepts "YYYY-MM-DDTHH:MM:SS" (or a space separator) with an optional
/// trailing "Z" or "+00:00". Other offsets are rejected: all data is UTC.
[[nodiscard]] TimePoint parse_timestamp(std::string_view text);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_number(double value);

/// Quotes a field when it contains a comma, quote or line break.
[[nodiscard]] std::string csv_escape(std::string_view field);

/// Splits one CSV record, honouring double-quoted fields.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

/// One row of a logger or weather-station export.
struct LoggerRecord {
    TimePoint time;
    double temp_c = 0.0;
    std::optional<double> rh_pct;
};

inline constexpr std::string_view kLoggerHeader = "timestamp,temp_c,rh_pct";
inline constexpr std::string_view kStateHeader = "timestamp,window_open";

/// Reads `timestamp,temp_c,rh_pct`. Empty rh cells are allowed. Rows must be
/// time-sorted; temperatures outside -40..60 degC are rejected as a likely
/// unit mismatch.
[[nodiscard]] std::vector<LoggerRecord> read_logger_csv(const std::filesystem::path& path);

void write_logger_csv(const std::filesystem::path& path, const TimeSeries& temperature,
                      const std::optional<TimeSeries>& humidity);

[[nodiscard]] BinarySeries read_state_csv(const std::filesystem::path& path);
void write_state_csv(const std::filesystem::path& path, const BinarySeries& state);

struct IngestOptions {
    std::optional<std::int64_t> step_seconds;  // default: the logger's median cadence
    ResampleOptions resample;
};

/// Loads a logger and a weather export, resamples both onto one grid aligned
/// with the logger and trimmed to the overlapping time range.
[[nodiscard]] SensorDataset ingest(const std::filesystem::path& logger_csv,
                                   const std::filesystem::path& weather_csv,
                                   const IngestOptions& options = {});

/// Writes logger.csv, weather.csv and (when present) W.csv into `dir`.
void write_dataset(const std::filesystem::path& dir, const SensorDataset& dataset);

/// Plot-ready ST panels: t, T_norm, T_smooth, T_resid, d2, G.
void write_intermediates_csv(const std::filesystem::path& path, const TimeSeries& temperature,
                             const DetectionResult& result, Normalization normalization);

[[nodiscard]] std::string metrics_csv_header();
[[nodiscard]] std::string metrics_csv_row(const MetricsReport& report);

/// Writes text, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace winop
