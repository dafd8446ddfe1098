#include "doctest.h"
#include "support/oracles.hpp"

#include "winop/error.hpp"
#include "winop/features.hpp"
#include "winop/synthgen.hpp"

#include <cmath>
#include <set>

using namespace winop;

namespace {

const TimePoint t0 = std::chrono::sys_days(std::chrono::year{2023} / 7 / 20);

SensorDataset make_dataset(std::vector<double> t_meas, std::vector<double> t_amb) {
    return SensorDataset{TimeSeries(t0, 1800, std::move(t_meas)),
                         TimeSeries(t0, 1800, std::move(t_amb)),
                         std::nullopt, std::nullopt, std::nullopt, {}};
}

}  // namespace

TEST_CASE("vocabulary names round trip") {
    const auto vocab = base_vocabulary();
    CHECK(vocab.size() == 12);
    for (FeatureId id : vocab) CHECK(parse_feature(to_string(id)) == id);
    CHECK_THROWS_AS(parse_feature("T_roof"), InvalidArgument);
    CHECK(uses_humidity(FeatureId::rh_meas));
    CHECK_FALSE(uses_humidity(FeatureId::t_amb_minus_t_meas));
}

TEST_CASE("feature set parsing") {
    const FeatureSet s = FeatureSet::parse("T_amb-T_meas+dT_meas");
    CHECK(s.features == std::vector<FeatureId>{FeatureId::t_amb_minus_t_meas, FeatureId::dt_meas});
    CHECK(s.name == "T_amb-T_meas+dT_meas");
    CHECK(FeatureSet::parse("T_amb,T_meas").name == "T_amb+T_meas");
    CHECK_THROWS_AS(FeatureSet::parse("T_meas+T_meas"), InvalidArgument);
    CHECK_THROWS_AS(FeatureSet::parse(""), InvalidArgument);
    CHECK_THROWS_AS(FeatureSet::of({}), InvalidArgument);
}

TEST_CASE("enumeration counts and order") {
    const auto vocab = base_vocabulary();
    CHECK(enumerate_feature_sets(vocab, {1}).size() == 12);
    const auto pairs = enumerate_feature_sets(vocab, {2});
    CHECK(pairs.size() == 78);
    CHECK(pairs.front().name == "T_amb");
    CHECK(pairs[12].name == "T_amb+T_meas");
    CHECK(pairs.back().name == "RH_amb-RH_meas+RH_meas-dRH_meas");
    CHECK(enumerate_feature_sets(vocab, {12}).size() == 4095);
    std::set<std::string> names;
    for (const auto& s : pairs) names.insert(s.name);
    CHECK(names.size() == pairs.size());
    const auto again = enumerate_feature_sets(vocab, {2});
    CHECK(again == pairs);
    CHECK_THROWS_AS(enumerate_feature_sets({}, {2}), InvalidArgument);
}

TEST_CASE("degenerate columns are reported by name") {
    const SensorDataset flat = make_dataset(std::vector<double>(50, 21.0), std::vector<double>(50, 18.0));
    CHECK_THROWS_AS(build_features(flat, FeatureSet::parse("T_meas")), DegenerateInput);

    std::vector<double> wave(50);
    for (std::size_t i = 0; i < wave.size(); ++i) wave[i] = std::sin(0.3 * static_cast<double>(i));
    const SensorDataset same = make_dataset(wave, wave);
    try {
        (void)build_features(same, FeatureSet::parse("T_amb-T_meas"));
        FAIL("expected a degenerate-input error");
    } catch (const DegenerateInput& e) {
        CHECK(std::string(e.what()).find("T_amb-T_meas") != std::string::npos);
    }
}

TEST_CASE("humidity features need humidity") {
    oracle::Gen gen(31);
    const SensorDataset ds = make_dataset(gen.normals(40), gen.normals(40));
    CHECK_THROWS_AS(build_features(ds, FeatureSet::parse("RH_meas")), InvalidArgument);
}

TEST_CASE("columns are standardized recomputations of the raw features") {
    ScenarioConfig c = preset("A");
    c.duration_days = 1000.0 * c.step_seconds / 86400.0;
    const SensorDataset ds = generate(c);
    REQUIRE(ds.grid().size == 1000);
    const FeatureMatrix m = build_features(ds, FeatureSet::parse("T_meas+dT_meas"));
    CHECK(m.rows == 1000);
    CHECK(m.cols == 2);
    CHECK(m.column_names == std::vector<std::string>{"T_meas", "dT_meas"});

    // Independent derivative and z-score.
    const auto t = ds.indoor_temperature.values();
    const double h = c.step_seconds / 3600.0;
    std::vector<double> d(t.size());
    d.front() = (t[1] - t[0]) / h;
    d.back() = (t[t.size() - 1] - t[t.size() - 2]) / h;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) d[i] = (t[i + 1] - t[i - 1]) / (2 * h);
    const auto st = oracle::two_pass(d);
    for (std::size_t r = 0; r < m.rows; ++r) {
        REQUIRE(std::abs(m.at(r, 1) - (d[r] - st.mean) / st.stddev) < 1e-9);
    }
    for (std::size_t col = 0; col < m.cols; ++col) {
        std::vector<double> v(m.rows);
        for (std::size_t r = 0; r < m.rows; ++r) v[r] = m.at(r, col);
        const auto s = oracle::two_pass(v);
        CHECK(std::abs(s.mean) < 1e-9);
        CHECK(std::abs(s.stddev - 1.0) < 1e-6);
    }
}

TEST_CASE("positive rescaling of the inputs leaves every column unchanged") {
    oracle::Gen gen(32);
    auto tin = gen.normals(300, 22, 2);
    auto tamb = gen.normals(300, 15, 4);
    const SensorDataset a = make_dataset(tin, tamb);
    for (auto& v : tin) v *= 3.5;
    for (auto& v : tamb) v *= 3.5;
    const SensorDataset b = make_dataset(tin, tamb);
    for (const auto& set : enumerate_feature_sets(std::span(base_vocabulary()).first(6), {1})) {
        const FeatureMatrix ma = build_features(a, set);
        const FeatureMatrix mb = build_features(b, set);
        for (std::size_t i = 0; i < ma.data.size(); ++i) {
            REQUIRE(std::abs(ma.data[i] - mb.data[i]) < 1e-9);
        }
    }
}
