#include "winop/commands.hpp"

#include "winop/csv_io.hpp"
#include "winop/error.hpp"
#include "winop/metrics.hpp"
#include "winop/st_detector.hpp"
#include "winop/sweep.hpp"
#include "winop/synthgen.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

namespace winop {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string csv_number(double v) {
    return std::isfinite(v) ? format_number(v) : std::string();
}

void require(const std::string& value, const std::string& flag, const std::string& command) {
    if (value.empty()) {
        throw InvalidArgument(command + " requires " + flag);
    }
}

void write_config(const RunConfig& config) {
    write_text_file(fs::path(config.output) / "run_config.json", dump(to_json(config)));
}

// Cuts a ground-truth series down to `grid`. The truth may cover more time
// than the ingested overlap but must share its step and phase.
BinarySeries align_truth(const BinarySeries& truth, const Grid& grid) {
    if (truth.grid() == grid) {
        return truth;
    }
    if (truth.step() != grid.step) {
        throw AlignmentError("step", "truth has " + std::to_string(truth.step()) +
                                         " s, data has " + std::to_string(grid.step) + " s");
    }
    const std::int64_t offset = (grid.start - truth.start()).count();
    if (offset < 0 || offset % grid.step != 0) {
        throw AlignmentError("start", "truth starts at " + format_timestamp(truth.start()) +
                                          ", data grid starts at " +
                                          format_timestamp(grid.start));
    }
    const auto first = static_cast<std::size_t>(offset / grid.step);
    if (first + grid.size > truth.size()) {
        throw AlignmentError("length", "truth ends before the data grid");
    }
    const auto s = truth.states();
    return BinarySeries(grid, std::vector<std::uint8_t>(s.begin() + static_cast<std::ptrdiff_t>(first),
                                                        s.begin() + static_cast<std::ptrdiff_t>(first + grid.size)));
}

SensorDataset load_inputs(const RunConfig& c) {
    require(c.logger, "--logger", c.command);
    require(c.weather, "--weather", c.command);
    IngestOptions opts;
    opts.step_seconds = c.step_seconds;
    opts.resample = c.resample;
    return ingest(c.logger, c.weather, opts);
}

void validate_matching(const MatchOptions& m) {
    if (m.tolerance < 0) {
        throw InvalidArgument("tolerance must be non-negative");
    }
}

void write_metrics(const fs::path& dir, const MetricsReport& report) {
    write_text_file(dir / "metrics.json", dump(to_json(report)));
    write_text_file(dir / "metrics.csv",
                    metrics_csv_header() + "\r\n" + metrics_csv_row(report) + "\r\n");
}

}  // namespace

void cmd_generate(const RunConfig& c) {
    require(c.output, "--out", "generate");
    ScenarioConfig scenario;
    if (c.scenario) {
        scenario = *c.scenario;
    } else if (!c.preset.empty()) {
        scenario = preset(c.preset);
    } else {
        throw InvalidArgument("generate requires --preset or a scenario in --config");
    }
    scenario.seed = c.seed;
    const SensorDataset ds = generate(scenario);
    const fs::path dir(c.output);
    write_dataset(dir, ds);

    ordered_json prov;
    prov["scenario"] = to_json(scenario);
    prov["samples"] = ds.grid().size;
    prov["open_fraction"] = ds.window_state->open_fraction();
    prov["open_hours"] = ds.window_state->open_fraction() * static_cast<double>(ds.grid().size) *
                         ds.grid().step_hours();
    prov["indoor_ambient_t_statistic"] = indoor_ambient_t_statistic(ds);
    write_text_file(dir / "provenance.json", dump(prov));

    RunConfig resolved = c;
    resolved.scenario = scenario;
    write_config(resolved);
}

void cmd_detect(const RunConfig& c) {
    require(c.output, "--out", "detect");
    validate_matching(c.matching);
    SensorDataset ds = load_inputs(c);
    const fs::path dir(c.output);
    fs::create_directories(dir);

    ordered_json summary;
    summary["method"] = c.method;
    summary["samples"] = ds.grid().size;
    summary["start"] = format_timestamp(ds.grid().start);
    summary["step_seconds"] = ds.grid().step;

    std::optional<BinarySeries> state;
    if (c.method == "st") {
        c.st.validate();
        const DetectionResult result = detect(ds.indoor_temperature, c.st);
        write_intermediates_csv(dir / "intermediates.csv", ds.indoor_temperature, result,
                                c.normalization);
        summary["diagnostics"] = to_json(result.diagnostics);
        state = result.state;
    } else if (c.method == "svm") {
        const FeatureSet set = FeatureSet::parse(c.features);
        const SvmDetection det = detect_svm(ds, set, c.svm, c.mapping);
        std::ostringstream csv;
        csv << "t,decision,state\r\n";
        const Grid grid = det.prediction.state.grid();
        for (std::size_t i = 0; i < grid.size; ++i) {
            csv << format_timestamp(grid.time_at(i)) << ','
                << format_number(det.prediction.decisions[i]) << ','
                << static_cast<int>(det.prediction.state[i]) << "\r\n";
        }
        write_text_file(dir / "decisions.csv", csv.str());
        summary["feature_set"] = set.name;
        summary["gamma"] = det.gamma;
        summary["support_vectors"] = det.support_count;
        summary["iterations"] = det.iterations;
        summary["outlier_fraction"] = det.prediction.outlier_fraction;
        summary["mapping"] = to_string(det.prediction.resolved);
        state = det.prediction.state;
    } else {
        throw InvalidArgument("unknown method '" + c.method + "' (expected st or svm)");
    }
    summary["open_fraction"] = state->open_fraction();
    write_state_csv(dir / "I.csv", *state);
    write_text_file(dir / "detect_summary.json", dump(summary));

    if (!c.truth.empty()) {
        const BinarySeries truth = align_truth(read_state_csv(c.truth), state->grid());
        write_metrics(dir, evaluate(*state, truth, c.matching));
    }
    write_config(c);
}

void cmd_sweep(const RunConfig& c) {
    require(c.output, "--out", "sweep");
    require(c.truth, "--truth", "sweep");
    validate_matching(c.matching);
    c.st.validate();
    SensorDataset ds = load_inputs(c);
    ds.window_state = align_truth(read_state_csv(c.truth), ds.grid());

    SweepOptions opts;
    opts.policy = c.policy;
    opts.svm = c.svm;
    opts.mapping = c.mapping;
    opts.matching = c.matching;
    opts.threads = c.threads;
    const SweepResult sweep = run_sweep(ds, opts);

    const DetectionResult st = detect(ds.indoor_temperature, c.st);
    const MetricsReport st_metrics = evaluate(st.state, *ds.window_state, c.matching);

    const fs::path dir(c.output);
    std::ostringstream rows;
    rows << "set,size,status,skip_reason,mapping,outlier_fraction,support_vectors,iterations,"
         << metrics_csv_header() << "\r\n";
    for (const SweepRow& row : sweep.rows) {
        rows << csv_escape(row.set.name) << ',' << row.set.features.size() << ',';
        if (row.skipped()) {
            rows << "skipped," << csv_escape(row.skip_reason) << ",,,,";
            for (std::size_t k = 0; k < 13; ++k) rows << ',';
        } else {
            const SvmDetection& d = *row.detection;
            rows << "ok,," << to_string(d.prediction.resolved) << ','
                 << format_number(d.prediction.outlier_fraction) << ',' << d.support_count << ','
                 << d.iterations << ',' << metrics_csv_row(*row.metrics);
        }
        rows << "\r\n";
    }
    write_text_file(dir / "sweep.csv", rows.str());

    std::ostringstream box;
    box << "metric,method,count,mean,median,min,q1,q3,max\r\n";
    ordered_json metrics = ordered_json::object();
    for (const std::string& name : summary_metric_names()) {
        if (const auto it = sweep.summary.find(name); it != sweep.summary.end()) {
            const MetricSummary& s = it->second;
            metrics[name] = to_json(s);
            box << name << ",svm," << s.count << ',' << csv_number(s.mean) << ','
                << csv_number(s.median) << ',' << csv_number(s.min) << ',' << csv_number(s.q1)
                << ',' << csv_number(s.q3) << ',' << csv_number(s.max) << "\r\n";
        }
        const std::string v = csv_number(metric_value(st_metrics, name));
        box << name << ",st,1," << v << ',' << v << ',' << v << ',' << v << ',' << v << ',' << v
            << "\r\n";
    }
    write_text_file(dir / "boxplot.csv", box.str());

    ordered_json summary;
    summary["sets"] = sweep.rows.size();
    summary["evaluated"] = sweep.rows.size() - sweep.skipped;
    summary["skipped"] = sweep.skipped;
    summary["svm"] = metrics;
    summary["st"] = to_json(st_metrics);
    summary["st_diagnostics"] = to_json(st.diagnostics);
    write_text_file(dir / "summary.json", dump(summary));
    write_config(c);
}

void cmd_evaluate(const RunConfig& c, std::ostream& out) {
    require(c.predicted, "--predicted", "evaluate");
    require(c.truth, "--truth", "evaluate");
    validate_matching(c.matching);
    const BinarySeries predicted = read_state_csv(c.predicted);
    const BinarySeries truth = align_truth(read_state_csv(c.truth), predicted.grid());
    const MetricsReport report = evaluate(predicted, truth, c.matching);
    if (c.output.empty()) {
        out << dump(to_json(report));
        return;
    }
    write_metrics(c.output, report);
    write_config(c);
}

void cmd_report(const RunConfig& c, std::ostream& out) {
    if (c.runs.empty()) {
        throw InvalidArgument("report requires at least one --runs directory");
    }
    std::ostringstream table;
    table << "run,method,statistic";
    for (const std::string& name : summary_metric_names()) table << ',' << name;
    table << "\r\n";

    auto cell = [](const json& j, const std::string& key) {
        const auto it = j.find(key);
        return it == j.end() || !it->is_number() ? std::string() : format_number(it->get<double>());
    };
    auto report_row = [&](const std::string& run, const std::string& method,
                          const std::string& statistic, const json& metrics) {
        table << csv_escape(run) << ',' << csv_escape(method) << ',' << statistic;
        for (const std::string& name : summary_metric_names()) table << ',' << cell(metrics, name);
        table << "\r\n";
    };

    for (const std::string& run : c.runs) {
        const fs::path dir(run);
        const std::string label = dir.filename().empty() ? dir.parent_path().filename().string()
                                                         : dir.filename().string();
        std::string method = "unknown";
        if (fs::exists(dir / "run_config.json")) {
            const json cfg = read_json_file(dir / "run_config.json");
            method = cfg.value("method", method);
            if (method == "svm") method += ":" + cfg.value("features", std::string());
        }
        if (fs::exists(dir / "summary.json")) {
            const json s = read_json_file(dir / "summary.json");
            for (const char* stat : {"mean", "median"}) {
                json row = json::object();
                for (const auto& [name, q] : s.at("svm").items()) row[name] = q.at(stat);
                report_row(label, "svm", stat, row);
            }
            report_row(label, "st", "value", s.at("st"));
        } else if (fs::exists(dir / "metrics.json")) {
            report_row(label, method, "value", read_json_file(dir / "metrics.json"));
        } else {
            throw Error("'" + run + "' holds neither metrics.json nor summary.json");
        }
    }
    if (c.output.empty()) {
        out << table.str();
        return;
    }
    write_text_file(fs::path(c.output) / "report.csv", table.str());
    write_config(c);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Window-opening detection from indoor temperature logs", "winop"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "winop 0.1.0");

    std::optional<std::string> config_path;
    std::optional<std::string> logger, weather, truth, predicted, output, method, features,
        collapse, normalization, gamma, mapping, gap_policy, preset_name, step;
    std::vector<std::string> runs;
    std::optional<double> half_life, sigma, nu;
    std::optional<int> initial_state, min_separation, max_size, tolerance, max_gap;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool invert_signs = false;
    bool direction_agnostic = false;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration; flags override it");
    };
    auto add_inputs = [&](CLI::App* sub) {
        sub->add_option("--logger", logger, "indoor logger CSV (timestamp,temp_c,rh_pct)");
        sub->add_option("--weather", weather, "weather station CSV, same columns");
        sub->add_option("--step", step, "resampling step in seconds, or 'auto'");
        sub->add_option("--gap-policy", gap_policy, "fail | linear_interpolate");
        sub->add_option("--max-gap", max_gap, "longest silently bridged gap, in steps");
    };
    auto add_st = [&](CLI::App* sub) {
        sub->add_option("--half-life-hours", half_life, "EWM half-life");
        sub->add_option("--sigma", sigma, "threshold in standard deviations");
        sub->add_option("--initial-state", initial_state, "state before the first guess (0 or 1)");
        sub->add_option("--min-separation", min_separation, "merge guesses this close (steps)");
        sub->add_flag("--invert-signs", invert_signs, "positive curvature opens the window");
        sub->add_option("--collapse", collapse, "any_sign | same_sign");
    };
    auto add_svm = [&](CLI::App* sub) {
        sub->add_option("--nu", nu, "OCSVM nu");
        sub->add_option("--gamma", gamma, "RBF gamma: 'scale' or a number");
        sub->add_option("--mapping", mapping, "auto | outlier_is_open | outlier_is_closed");
    };
    auto add_matching = [&](CLI::App* sub) {
        sub->add_option("--tolerance", tolerance, "near-hit window in steps");
        sub->add_flag("--direction-agnostic", direction_agnostic,
                      "match guesses to actions of either direction");
    };

    CLI::App* gen = app.add_subcommand("generate", "write a synthetic dataset");
    add_config(gen);
    gen->add_option("--preset", preset_name, "A | B | C");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--out", output, "output directory");

    CLI::App* det = app.add_subcommand("detect", "infer window state from one dataset");
    add_config(det);
    add_inputs(det);
    add_st(det);
    add_svm(det);
    add_matching(det);
    det->add_option("--method", method, "st | svm");
    det->add_option("--features", features, "SVM feature set, e.g. T_meas+dT_meas");
    det->add_option("--normalization", normalization, "zscore | minmax (T_norm column)");
    det->add_option("--truth", truth, "ground-truth W.csv; writes metrics when given");
    det->add_option("--out", output, "output directory");

    CLI::App* swp = app.add_subcommand("sweep", "evaluate every feature set against the truth");
    add_config(swp);
    add_inputs(swp);
    add_st(swp);
    add_svm(swp);
    add_matching(swp);
    swp->add_option("--truth", truth, "ground-truth W.csv");
    swp->add_option("--max-size", max_size, "largest feature-set size");
    swp->add_option("--threads", threads, "worker threads (0: all cores)");
    swp->add_option("--out", output, "output directory");

    CLI::App* evl = app.add_subcommand("evaluate", "score a predicted state against the truth");
    add_config(evl);
    add_matching(evl);
    evl->add_option("--predicted", predicted, "predicted I.csv");
    evl->add_option("--truth", truth, "ground-truth W.csv");
    evl->add_option("--out", output, "output directory (default: print JSON)");

    CLI::App* rep = app.add_subcommand("report", "tabulate several runs");
    add_config(rep);
    rep->add_option("--runs", runs, "run output directories")->expected(1, -1);
    rep->add_option("--out", output, "output directory (default: print CSV)");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        RunConfig c;
        if (config_path) c = load_run_config(*config_path);
        const CLI::App* sub = app.get_subcommands().front();
        c.command = sub->get_name();

        if (logger) c.logger = *logger;
        if (weather) c.weather = *weather;
        if (truth) c.truth = *truth;
        if (predicted) c.predicted = *predicted;
        if (!runs.empty()) c.runs = runs;
        if (output) c.output = *output;
        if (method) c.method = *method;
        if (features) c.features = *features;
        if (preset_name) c.preset = *preset_name;
        if (seed) c.seed = *seed;
        if (threads) c.threads = *threads;
        if (max_size) c.policy.max_size = *max_size;
        if (step) {
            if (*step == "auto") {
                c.step_seconds.reset();
            } else {
                std::int64_t s = 0;
                try {
                    s = std::stoll(*step);
                } catch (const std::exception&) {
                    throw InvalidArgument("--step expects seconds or 'auto', got '" + *step + "'");
                }
                c.step_seconds = s;
            }
        }
        if (gap_policy) c.resample.gap_policy = parse_gap_policy(*gap_policy);
        if (max_gap) c.resample.max_gap_steps = *max_gap;
        if (half_life) c.st.half_life = Seconds(*half_life * kSecondsPerHour);
        if (sigma) c.st.sigma_threshold = *sigma;
        if (initial_state) {
            if (*initial_state != 0 && *initial_state != 1) {
                throw InvalidArgument("--initial-state must be 0 or 1");
            }
            c.st.initial_state = static_cast<std::uint8_t>(*initial_state);
        }
        if (min_separation) c.st.min_event_separation = *min_separation;
        if (invert_signs) c.st.invert_signs = true;
        if (collapse) c.st.collapse = parse_collapse_mode(*collapse);
        if (normalization) c.normalization = parse_normalization(*normalization);
        if (nu) c.svm.nu = *nu;
        if (gamma) {
            if (*gamma == "scale") {
                c.svm.gamma = Gamma::scale();
            } else {
                try {
                    c.svm.gamma = Gamma::fixed(std::stod(*gamma));
                } catch (const std::exception&) {
                    throw InvalidArgument("--gamma expects 'scale' or a number, got '" + *gamma + "'");
                }
            }
        }
        if (mapping) c.mapping = parse_outlier_mapping(*mapping);
        if (tolerance) c.matching.tolerance = *tolerance;
        if (direction_agnostic) c.matching.require_same_direction = false;

        if (c.command == "generate") {
            cmd_generate(c);
        } else if (c.command == "detect") {
            cmd_detect(c);
        } else if (c.command == "sweep") {
            cmd_sweep(c);
        } else if (c.command == "evaluate") {
            cmd_evaluate(c, out);
        } else {
            cmd_report(c, out);
        }
    } catch (const std::exception& e) {
        err << "winop: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace winop
