#include "doctest.h"

#include "winop/error.hpp"
#include "winop/sweep.hpp"
#include "winop/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace winop;

namespace {

const SensorDataset& preset_a() {
    static const SensorDataset ds = generate(preset("A"));
    return ds;
}

}  // namespace

TEST_CASE("singleton policy gives twelve rows") {
    SweepOptions opts;
    opts.policy.max_size = 1;
    const SweepResult r = run_sweep(preset_a(), opts);
    CHECK(r.rows.size() == 12);
    CHECK(r.skipped == 0);
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        CHECK(r.rows[k].set.name == to_string(base_vocabulary()[k]));
        CHECK(r.rows[k].metrics.has_value());
    }
}

TEST_CASE("summary mean is the arithmetic mean") {
    SweepOptions opts;
    opts.policy.max_size = 1;
    const SweepResult r = run_sweep(preset_a(), opts);
    double sum = 0.0;
    for (const auto& row : r.rows) sum += row.metrics->macro_f1;
    const MetricSummary& s = r.summary.at("macro_f1");
    CHECK(s.count == 12);
    CHECK(std::abs(s.mean - sum / 12.0) < 1e-12);
    CHECK(s.min <= s.q1);
    CHECK(s.q1 <= s.median);
    CHECK(s.median <= s.q3);
    CHECK(s.q3 <= s.max);
}

TEST_CASE("quantiles interpolate between order statistics") {
    const MetricSummary s = summarize({4, 1, 3, 2});
    CHECK(s.min == 1);
    CHECK(s.max == 4);
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.q1 == doctest::Approx(1.75));
    CHECK(s.q3 == doctest::Approx(3.25));
    CHECK(summarize({}).count == 0);
    const double inf = INFINITY;
    const MetricSummary with_inf = summarize({1, inf, inf});
    CHECK(with_inf.max == inf);
    CHECK_FALSE(std::isnan(with_inf.q3));
}

TEST_CASE("summary is permutation invariant and runs are repeatable") {
    SweepOptions opts;
    opts.policy.max_size = 1;
    auto sets = enumerate_feature_sets(base_vocabulary(), opts.policy);
    const SweepResult a = run_sweep(preset_a(), sets, opts);
    std::reverse(sets.begin(), sets.end());
    opts.threads = 3;
    const SweepResult b = run_sweep(preset_a(), sets, opts);
    for (const auto& name : summary_metric_names()) {
        CHECK(a.summary.at(name).mean == doctest::Approx(b.summary.at(name).mean).epsilon(1e-12));
        CHECK(a.summary.at(name).median == b.summary.at(name).median);
    }
    const SweepResult c = run_sweep(preset_a(), enumerate_feature_sets(base_vocabulary(), opts.policy), opts);
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(a.rows[k].set == c.rows[k].set);
        CHECK(a.rows[k].detection->prediction.state == c.rows[k].detection->prediction.state);
    }
}

TEST_CASE("degenerate sets are skipped and all-fail is an error") {
    SensorDataset ds = preset_a();
    ds.ambient_temperature = ds.ambient_temperature.with_values(
        std::vector<double>(ds.grid().size, 18.0));
    SweepOptions opts;
    opts.policy.max_size = 1;
    const SweepResult r = run_sweep(ds, opts);
    CHECK(r.skipped == 2);  // T_amb and dT_amb are constant
    CHECK(r.rows[0].skipped());
    CHECK(r.rows[0].skip_reason.find("T_amb") != std::string::npos);
    CHECK(r.summary.at("macro_f1").count == 10);

    const std::vector<FeatureSet> only_flat{FeatureSet::parse("T_amb"), FeatureSet::parse("dT_amb")};
    CHECK_THROWS_AS(run_sweep(ds, only_flat, opts), Error);
}

TEST_CASE("sweep without humidity skips humidity sets") {
    SensorDataset ds = preset_a();
    ds.indoor_humidity.reset();
    ds.ambient_humidity.reset();
    SweepOptions opts;
    opts.policy.max_size = 1;
    const SweepResult r = run_sweep(ds, opts);
    CHECK(r.skipped == 6);
}
