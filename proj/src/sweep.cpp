#include "winop/sweep.hpp"

#include "winop/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace winop {

SvmDetection detect_svm(const SensorDataset& dataset, const FeatureSet& set,
                        const OcsvmParams& params, OutlierMapping mapping) {
    const FeatureMatrix x = build_features(dataset, set);
    const OcsvmModel model = fit_ocsvm(x, params);
    return SvmDetection{set, predict_state(model, x, mapping), model.support_count(),
                        model.iterations, model.gamma};
}

const std::vector<std::string>& summary_metric_names() {
    static const std::vector<std::string> names{
        "macro_f1",
        "true_opening_hours",
        "false_opening_hours",
        "hits_near_hits_over_guesses",
        "guesses_over_actions",
    };
    return names;
}

double metric_value(const MetricsReport& report, const std::string& name) {
    if (name == "macro_f1") return report.macro_f1;
    if (name == "true_opening_hours") return report.true_opening_hours;
    if (name == "false_opening_hours") return report.false_opening_hours;
    if (name == "hits_near_hits_over_guesses") return report.hits_near_hits_over_guesses;
    if (name == "guesses_over_actions") return report.guesses_over_actions;
    throw InvalidArgument("unknown metric '" + name + "'");
}

MetricSummary summarize(std::vector<double> values) {
    MetricSummary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        if (frac == 0.0 || values[lo] == values[hi]) {
            return values[lo];
        }
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.median = quantile(0.5);
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(0.25);
    s.q3 = quantile(0.75);
    return s;
}

SweepResult run_sweep(const SensorDataset& dataset, const SweepOptions& options) {
    return run_sweep(dataset, enumerate_feature_sets(base_vocabulary(), options.policy), options);
}

SweepResult run_sweep(const SensorDataset& dataset, const std::vector<FeatureSet>& sets,
                      const SweepOptions& options) {
    options.svm.validate();
    dataset.validate();
    SweepResult result;
    result.rows.resize(sets.size());

    auto evaluate_one = [&](std::size_t k) {
        SweepRow& row = result.rows[k];
        row.set = sets[k];
        try {
            SvmDetection det = detect_svm(dataset, sets[k], options.svm, options.mapping);
            if (dataset.window_state) {
                row.metrics = evaluate(det.prediction.state, *dataset.window_state,
                                       options.matching);
            }
            row.detection = std::move(det);
        } catch (const Error& e) {
            row.skip_reason = e.what();
        }
    };

    unsigned workers = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(sets.size(), 1)));
    if (workers == 1) {
        for (std::size_t k = 0; k < sets.size(); ++k) {
            evaluate_one(k);
        }
    } else {
        // Each slot is written by exactly one worker; order is fixed by index.
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < sets.size(); k = next++) {
                    evaluate_one(k);
                }
            });
        }
    }

    for (const SweepRow& row : result.rows) {
        result.skipped += row.skipped() ? 1 : 0;
    }
    if (!sets.empty() && result.skipped == sets.size()) {
        throw Error("every feature set failed; first reason: " + result.rows.front().skip_reason);
    }

    for (const std::string& name : summary_metric_names()) {
        std::vector<double> values;
        for (const SweepRow& row : result.rows) {
            if (row.metrics) {
                values.push_back(metric_value(*row.metrics, name));
            }
        }
        if (!values.empty()) {
            result.summary[name] = summarize(std::move(values));
        }
    }
    return result;
}

}  // namespace winop
