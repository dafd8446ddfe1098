#include "doctest.h"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

#include "winop/csv_io.hpp"
#include "winop/error.hpp"
#include "winop/run_config.hpp"
#include "winop/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

using namespace winop;
namespace fs = std::filesystem;

namespace {

const TimePoint t0 = std::chrono::sys_days(std::chrono::year{2023} / 7 / 20);

using testing_support::TempDir;
const auto put = testing_support::write_file;
const auto slurp = testing_support::read_file;

std::string logger_rows(TimePoint start, int step, int count, double base, bool rh = true) {
    std::string out = "timestamp,temp_c,rh_pct\n";
    for (int i = 0; i < count; ++i) {
        out += format_timestamp(start + std::chrono::seconds(step * i)) + "," +
               format_number(base + 0.1 * i) + "," + (rh ? format_number(50.0 + 0.5 * i) : "") + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("timestamps") {
    CHECK(format_timestamp(t0 + std::chrono::seconds(3723)) == "2023-07-20T01:02:03Z");
    CHECK(parse_timestamp("2023-07-20T01:02:03Z") == t0 + std::chrono::seconds(3723));
    CHECK(parse_timestamp("2023-07-20 01:02:03") == t0 + std::chrono::seconds(3723));
    CHECK(parse_timestamp("2023-07-20T01:02:03+00:00") == t0 + std::chrono::seconds(3723));
    CHECK_THROWS_AS(parse_timestamp("2023-07-20T01:02:03+02:00"), InvalidArgument);
    CHECK_THROWS_AS(parse_timestamp("2023-02-30T00:00:00Z"), InvalidArgument);
    CHECK_THROWS_AS(parse_timestamp("20/07/2023 01:02"), InvalidArgument);
}

TEST_CASE("numbers round trip exactly") {
    oracle::Gen gen(61);
    for (int i = 0; i < 1000; ++i) {
        const double v = gen.normal(0, std::pow(10.0, gen.uniform(-8, 8)));
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("csv quoting") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(split_csv_line("\"a,b\",c,\"d\"\"e\"") == std::vector<std::string>{"a,b", "c", "d\"e"});
    CHECK(split_csv_line("x,,z\r") == std::vector<std::string>{"x", "", "z"});
}

TEST_CASE("logger parsing errors name the line") {
    TempDir dir("parse");
    const fs::path p = dir.path() / "logger.csv";
    put(p, "timestamp,temp_c,rh_pct\n2023-07-20T00:00:00Z,21.0,50\n2023-07-20T00:05:00Z,abc,50\n");
    try {
        (void)read_logger_csv(p);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    put(p, "time,temp\n");
    CHECK_THROWS_AS(read_logger_csv(p), ParseError);
    put(p, "timestamp,temp_c,rh_pct\n2023-07-20T00:00:00Z,71.6,50\n2023-07-20T00:05:00Z,72.0,50\n");
    try {
        (void)read_logger_csv(p);
        FAIL("expected a unit error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("Fahrenheit") != std::string::npos);
        CHECK(e.line() == 2);
    }
    put(p, "timestamp,temp_c,rh_pct\n2023-07-20T00:05:00Z,21,50\n2023-07-20T00:00:00Z,21,50\n");
    CHECK_THROWS_AS(read_logger_csv(p), ParseError);
    CHECK_THROWS_AS(read_logger_csv(dir.path() / "missing.csv"), Error);
}

TEST_CASE("ingest interpolates the coarse station onto the logger grid") {
    TempDir dir("ingest");
    put(dir.path() / "logger.csv", logger_rows(t0, 300, 25, 22.0));
    put(dir.path() / "weather.csv", logger_rows(t0, 3600, 3, 15.0));
    IngestOptions opts;
    opts.step_seconds = 300;
    const SensorDataset ds = ingest(dir.path() / "logger.csv", dir.path() / "weather.csv", opts);
    CHECK(ds.grid().size == 25);
    CHECK(ds.ambient_temperature[6] == doctest::Approx(15.05));
    CHECK(ds.indoor_temperature[24] == doctest::Approx(24.4));
    CHECK(ds.indoor_humidity.has_value());
    CHECK_FALSE(ds.window_state.has_value());

    // Default step: the logger's cadence.
    const SensorDataset auto_step = ingest(dir.path() / "logger.csv", dir.path() / "weather.csv");
    CHECK(auto_step.grid().step == 300);
}

TEST_CASE("ingest trims to the overlap and rejects disjoint ranges") {
    TempDir dir("overlap");
    put(dir.path() / "logger.csv", logger_rows(t0, 300, 50, 22.0));
    put(dir.path() / "weather.csv", logger_rows(t0 + std::chrono::seconds(1000), 600, 10, 15.0, false));
    const SensorDataset ds = ingest(dir.path() / "logger.csv", dir.path() / "weather.csv");
    CHECK(ds.grid().start == t0 + std::chrono::seconds(1200));
    CHECK(ds.grid().time_at(ds.grid().size - 1) <= t0 + std::chrono::seconds(1000 + 5400));
    CHECK_FALSE(ds.indoor_humidity.has_value());

    put(dir.path() / "weather.csv", logger_rows(t0 + std::chrono::hours(48), 600, 10, 15.0));
    try {
        (void)ingest(dir.path() / "logger.csv", dir.path() / "weather.csv");
        FAIL("expected a non-overlap error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("overlap") != std::string::npos);
    }
}

TEST_CASE("state files") {
    TempDir dir("state");
    const BinarySeries w(t0, 1800, {0, 1, 1, 0});
    write_state_csv(dir.path() / "W.csv", w);
    CHECK(slurp(dir.path() / "W.csv").rfind("timestamp,window_open\r\n", 0) == 0);
    CHECK(read_state_csv(dir.path() / "W.csv") == w);
    put(dir.path() / "bad.csv", "timestamp,window_open\n2023-07-20T00:00:00Z,0\n2023-07-20T00:30:00Z,2\n");
    CHECK_THROWS_AS(read_state_csv(dir.path() / "bad.csv"), ParseError);
    put(dir.path() / "uneven.csv",
          "timestamp,window_open\n2023-07-20T00:00:00Z,0\n2023-07-20T00:30:00Z,1\n2023-07-20T01:30:00Z,1\n");
    CHECK_THROWS_AS(read_state_csv(dir.path() / "uneven.csv"), ParseError);
}

TEST_CASE("generated datasets survive a write and re-ingest") {
    TempDir dir("roundtrip");
    for (const char* name : {"A", "C"}) {
        const SensorDataset ds = generate(preset(name));
        write_dataset(dir.path(), ds);
        const SensorDataset back = ingest(dir.path() / "logger.csv", dir.path() / "weather.csv");
        REQUIRE(back.grid() == ds.grid());
        for (std::size_t i = 0; i < ds.grid().size; ++i) {
            REQUIRE(std::abs(back.indoor_temperature[i] - ds.indoor_temperature[i]) <= 1e-6);
            REQUIRE(std::abs(back.ambient_temperature[i] - ds.ambient_temperature[i]) <= 1e-6);
            REQUIRE(std::abs((*back.indoor_humidity)[i] - (*ds.indoor_humidity)[i]) <= 1e-6);
            REQUIRE(std::abs((*back.ambient_humidity)[i] - (*ds.ambient_humidity)[i]) <= 1e-6);
        }
        CHECK(read_state_csv(dir.path() / "W.csv") == *ds.window_state);
    }
}

TEST_CASE("run config round trips through JSON") {
    RunConfig c;
    c.command = "detect";
    c.logger = "in/logger.csv";
    c.method = "svm";
    c.features = "T_meas+dT_meas";
    c.st.half_life = Seconds(6 * 3600);
    c.st.collapse = CollapseMode::same_sign;
    c.svm.nu = 0.3;
    c.svm.gamma = Gamma::fixed(0.25);
    c.mapping = OutlierMapping::outlier_is_closed;
    c.step_seconds = 300;
    c.seed = 7;
    c.scenario = preset("B");
    const RunConfig back = run_config_from_json(nlohmann::json::parse(to_json(c).dump()));
    CHECK(dump(to_json(back)) == dump(to_json(c)));
    CHECK(back.st.half_life.count() == 6 * 3600);
    CHECK(back.svm.gamma.mode == Gamma::Mode::fixed);
    CHECK(back.scenario->duration_days == preset("B").duration_days);

    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"sigma": 2})")), InvalidArgument);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"st": {"sigma_threshold": "two"}})")),
                    InvalidArgument);
}

TEST_CASE("metrics serialise with a stable shape") {
    MetricsReport r;
    r.guesses = 3;
    r.guesses_over_actions = INFINITY;
    r.guesses_over_actions_undefined = true;
    const auto j = to_json(r);
    CHECK(j.at("guesses_over_actions").is_null());
    CHECK(j.at("guesses_over_actions_undefined") == true);
    const std::string row = metrics_csv_row(r);
    const std::string header = metrics_csv_header();
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
}
