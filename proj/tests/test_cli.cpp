#include "doctest.h"
#include "support/tempdir.hpp"

#include "winop/commands.hpp"
#include "winop/csv_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>

using namespace winop;
namespace fs = std::filesystem;
using testing_support::read_file;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string s(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("generate, detect and evaluate chain together") {
    TempDir dir("cli_chain");
    const fs::path data = dir.path() / "data";
    REQUIRE(run({"generate", "--preset", "A", "--seed", "3", "--out", s(data)}).code == 0);
    for (const char* f : {"logger.csv", "weather.csv", "W.csv", "provenance.json", "run_config.json"}) {
        CHECK(fs::exists(data / f));
    }
    const auto prov = nlohmann::json::parse(read_file(data / "provenance.json"));
    CHECK(prov.at("open_fraction").get<double>() == doctest::Approx(0.587).epsilon(0.02));

    const fs::path det = dir.path() / "det";
    const Outcome d = run({"detect", "--logger", s(data / "logger.csv"), "--weather", s(data / "weather.csv"),
                           "--truth", s(data / "W.csv"), "--out", s(det)});
    REQUIRE_MESSAGE(d.code == 0, d.err);
    for (const char* f : {"I.csv", "intermediates.csv", "detect_summary.json", "metrics.json", "metrics.csv",
                          "run_config.json"}) {
        CHECK(fs::exists(det / f));
    }
    CHECK(read_file(det / "intermediates.csv").rfind("t,T_norm,T_smooth,T_resid,d2,G\r\n", 0) == 0);
    const auto metrics = nlohmann::json::parse(read_file(det / "metrics.json"));
    for (const char* k : {"macro_f1", "true_opening_hours", "false_opening_hours", "hits", "near_hits",
                          "hits_near_hits_over_guesses", "guesses_over_actions"}) {
        CHECK(metrics.contains(k));
    }

    const Outcome e = run({"evaluate", "--predicted", s(det / "I.csv"), "--truth", s(data / "W.csv")});
    REQUIRE_MESSAGE(e.code == 0, e.err);
    const auto printed = nlohmann::json::parse(e.out);
    CHECK(printed.at("macro_f1") == metrics.at("macro_f1"));
    CHECK(printed.at("hits") == metrics.at("hits"));

    const fs::path svm = dir.path() / "svm";
    const Outcome v = run({"detect", "--method", "svm", "--features", "T_meas+RH_meas", "--logger",
                           s(data / "logger.csv"), "--weather", s(data / "weather.csv"), "--out", s(svm)});
    REQUIRE_MESSAGE(v.code == 0, v.err);
    CHECK(fs::exists(svm / "decisions.csv"));
    CHECK_FALSE(fs::exists(svm / "metrics.json"));
}

TEST_CASE("sweep writes one row per set and the boxplot table") {
    TempDir dir("cli_sweep");
    const fs::path data = dir.path() / "data";
    REQUIRE(run({"generate", "--preset", "A", "--out", s(data)}).code == 0);
    const std::vector<std::string> args{"sweep", "--logger", s(data / "logger.csv"), "--weather",
                                        s(data / "weather.csv"), "--truth", s(data / "W.csv"),
                                        "--max-size", "1", "--threads", "2", "--out"};
    auto first = args;
    first.push_back(s(dir.path() / "a"));
    auto second = args;
    second[second.size() - 2] = "1";  // single-threaded
    second.push_back(s(dir.path() / "b"));
    REQUIRE(run(first).code == 0);
    REQUIRE(run(second).code == 0);
    const std::string table = read_file(dir.path() / "a" / "sweep.csv");
    CHECK(line_count(table) == 13);
    CHECK(table == read_file(dir.path() / "b" / "sweep.csv"));
    CHECK(read_file(dir.path() / "a" / "boxplot.csv") == read_file(dir.path() / "b" / "boxplot.csv"));
    const auto summary = nlohmann::json::parse(read_file(dir.path() / "a" / "summary.json"));
    CHECK(summary.at("evaluated") == 12);
    CHECK(summary.at("svm").contains("guesses_over_actions"));

    const Outcome r = run({"report", "--runs", s(dir.path() / "a")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("svm") != std::string::npos);
    CHECK(r.out.find(",st,") != std::string::npos);
}

TEST_CASE("reruns are byte identical") {
    TempDir dir("cli_rerun");
    for (const char* name : {"x", "y"}) {
        const fs::path out = dir.path() / name;
        REQUIRE(run({"generate", "--preset", "C", "--seed", "5", "--out", s(out / "data")}).code == 0);
        REQUIRE(run({"detect", "--logger", s(out / "data" / "logger.csv"), "--weather",
                     s(out / "data" / "weather.csv"), "--truth", s(out / "data" / "W.csv"), "--out",
                     s(out / "det")})
                    .code == 0);
    }
    for (const char* f : {"data/logger.csv", "data/weather.csv", "data/W.csv", "det/I.csv",
                          "det/intermediates.csv", "det/metrics.json"}) {
        CHECK_MESSAGE(read_file(dir.path() / "x" / f) == read_file(dir.path() / "y" / f), f);
    }
}

TEST_CASE("a config file seeds the run and flags override it") {
    TempDir dir("cli_config");
    const fs::path data = dir.path() / "data";
    REQUIRE(run({"generate", "--preset", "A", "--out", s(data)}).code == 0);
    write_file(dir.path() / "cfg.json", R"({"st": {"half_life_hours": 6, "sigma_threshold": 2.5}})");
    const fs::path det = dir.path() / "det";
    const Outcome d = run({"detect", "--config", s(dir.path() / "cfg.json"), "--sigma", "3", "--logger",
                           s(data / "logger.csv"), "--weather", s(data / "weather.csv"), "--out", s(det)});
    REQUIRE_MESSAGE(d.code == 0, d.err);
    const auto cfg = nlohmann::json::parse(read_file(det / "run_config.json"));
    CHECK(cfg.at("st").at("half_life_hours") == 6.0);
    CHECK(cfg.at("st").at("sigma_threshold") == 3.0);

    // The written configuration reproduces the run.
    const fs::path again = dir.path() / "again";
    REQUIRE(run({"detect", "--config", s(det / "run_config.json"), "--out", s(again)}).code == 0);
    CHECK(read_file(det / "I.csv") == read_file(again / "I.csv"));

    write_file(dir.path() / "bad.json", R"({"st": {"sigma": 2}})");
    const Outcome bad = run({"detect", "--config", s(dir.path() / "bad.json"), "--logger",
                             s(data / "logger.csv"), "--weather", s(data / "weather.csv"), "--out", s(det)});
    CHECK(bad.code != 0);
    CHECK(bad.err.find("sigma") != std::string::npos);
}

TEST_CASE("errors exit nonzero with a message") {
    TempDir dir("cli_errors");
    CHECK(run({}).code != 0);
    CHECK(run({"frobnicate"}).code != 0);
    const Outcome missing = run({"detect", "--logger", "nope.csv", "--weather", "nope.csv", "--out",
                                 s(dir.path() / "o")});
    CHECK(missing.code != 0);
    CHECK(missing.err.find("winop: error:") != std::string::npos);
    CHECK(run({"generate", "--preset", "Q", "--out", s(dir.path() / "g")}).code != 0);
    CHECK(run({"detect", "--sigma", "-1", "--logger", "a", "--weather", "b", "--out", "c"}).code != 0);
    CHECK(run({"generate", "--preset", "A"}).code != 0);
    CHECK(run({"--help"}).code == 0);
}
