#pragma once

#include "winop/dataset.hpp"
#include "winop/features.hpp"
#include "winop/metrics.hpp"
#include "winop/ocsvm.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace winop {

struct SvmDetection {
    FeatureSet set;
    StatePrediction prediction;
    std::size_t support_count = 0;
    std::size_t iterations = 0;
    double gamma = 0.0;
};

/// Builds features, fits one model on the whole series and labels every row.
[[nodiscard]] SvmDetection detect_svm(const SensorDataset& dataset, const FeatureSet& set,
                                      const OcsvmParams& params, OutlierMapping mapping);

struct SweepOptions {
    EnumerationPolicy policy;
    OcsvmParams svm;
    OutlierMapping mapping = OutlierMapping::automatic;
    MatchOptions matching;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepRow {
    FeatureSet set;
    std::optional<SvmDetection> detection;
    std::optional<MetricsReport> metrics;  // present when the dataset has ground truth
    std::string skip_reason;

    [[nodiscard]] bool skipped() const { return !detection.has_value(); }
};

/// Box-plot statistics of one metric over the evaluated feature sets.
struct MetricSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // enumeration order
    std::map<std::string, MetricSummary> summary;
    std::size_t skipped = 0;
};

/// Names of the per-row metrics that are summarised.
[[nodiscard]] const std::vector<std::string>& summary_metric_names();
[[nodiscard]] double metric_value(const MetricsReport& report, const std::string& name);

/// Quantiles interpolate linearly between order statistics.
[[nodiscard]] MetricSummary summarize(std::vector<double> values);

/// One model per enumerated feature set. Sets that fail to build or fit are
/// recorded as skipped; the call throws only if every set fails.
[[nodiscard]] SweepResult run_sweep(const SensorDataset& dataset, const SweepOptions& options);

/// Same, over an explicit list of sets.
[[nodiscard]] SweepResult run_sweep(const SensorDataset& dataset,
                                    const std::vector<FeatureSet>& sets,
                                    const SweepOptions& options);

}  // namespace winop
