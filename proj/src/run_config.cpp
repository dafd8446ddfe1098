#include "winop/run_config.hpp"

#include "winop/csv_io.hpp"
#include "winop/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace winop {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_object(const json& j, const std::string& where,
                  std::initializer_list<std::string_view> known) {
    if (!j.is_object()) {
        throw InvalidArgument(where + ": expected a JSON object");
    }
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw InvalidArgument(where + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(where + "." + key + ": wrong type");
    }
}

// Non-finite values have no JSON spelling; they are written as null.
ordered_json number(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json gamma_to_json(const Gamma& g) {
    return g.mode == Gamma::Mode::scale ? ordered_json("scale") : ordered_json(g.value);
}

Gamma gamma_from_json(const json& j, const std::string& where) {
    if (j.is_string() && j.get<std::string>() == "scale") return Gamma::scale();
    if (j.is_number()) return Gamma::fixed(j.get<double>());
    throw InvalidArgument(where + ".gamma: expected \"scale\" or a positive number");
}

ordered_json st_to_json(const StConfig& c) {
    ordered_json j;
    j["half_life_hours"] = c.half_life.count() / kSecondsPerHour;
    j["sigma_threshold"] = c.sigma_threshold;
    j["initial_state"] = c.initial_state;
    j["min_event_separation"] = c.min_event_separation;
    j["invert_signs"] = c.invert_signs;
    j["collapse"] = to_string(c.collapse);
    return j;
}

StConfig st_from_json(const json& j, StConfig c) {
    const std::string where = "st";
    check_object(j, where, {"half_life_hours", "sigma_threshold", "initial_state",
                            "min_event_separation", "invert_signs", "collapse"});
    double hours = c.half_life.count() / kSecondsPerHour;
    read(j, "half_life_hours", hours, where);
    c.half_life = Seconds(hours * kSecondsPerHour);
    read(j, "sigma_threshold", c.sigma_threshold, where);
    int initial = c.initial_state;
    read(j, "initial_state", initial, where);
    if (initial != 0 && initial != 1) {
        throw InvalidArgument("st.initial_state must be 0 or 1");
    }
    c.initial_state = static_cast<std::uint8_t>(initial);
    read(j, "min_event_separation", c.min_event_separation, where);
    read(j, "invert_signs", c.invert_signs, where);
    if (j.contains("collapse")) {
        c.collapse = parse_collapse_mode(j.at("collapse").get<std::string>());
    }
    return c;
}

ordered_json svm_to_json(const OcsvmParams& p) {
    ordered_json j;
    j["nu"] = p.nu;
    j["gamma"] = gamma_to_json(p.gamma);
    j["tolerance"] = p.tolerance;
    j["max_iter"] = p.max_iter;
    j["full_gram_limit"] = p.full_gram_limit;
    j["cache_rows"] = p.cache_rows;
    return j;
}

OcsvmParams svm_from_json(const json& j, OcsvmParams p) {
    const std::string where = "svm";
    check_object(j, where,
                 {"nu", "gamma", "tolerance", "max_iter", "full_gram_limit", "cache_rows"});
    read(j, "nu", p.nu, where);
    if (j.contains("gamma")) p.gamma = gamma_from_json(j.at("gamma"), where);
    read(j, "tolerance", p.tolerance, where);
    read(j, "max_iter", p.max_iter, where);
    read(j, "full_gram_limit", p.full_gram_limit, where);
    read(j, "cache_rows", p.cache_rows, where);
    return p;
}

}  // namespace

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    ordered_json inputs = ordered_json::object();
    if (!c.logger.empty()) inputs["logger"] = c.logger;
    if (!c.weather.empty()) inputs["weather"] = c.weather;
    if (!c.truth.empty()) inputs["truth"] = c.truth;
    if (!c.predicted.empty()) inputs["predicted"] = c.predicted;
    if (!c.runs.empty()) inputs["runs"] = c.runs;
    j["inputs"] = inputs;
    j["method"] = c.method;
    j["features"] = c.features;
    j["st"] = st_to_json(c.st);
    j["normalization"] = to_string(c.normalization);
    j["svm"] = svm_to_json(c.svm);
    j["mapping"] = to_string(c.mapping);
    j["max_set_size"] = c.policy.max_size;
    j["tolerance_steps"] = c.matching.tolerance;
    j["require_same_direction"] = c.matching.require_same_direction;
    j["step_seconds"] = c.step_seconds ? ordered_json(*c.step_seconds) : ordered_json("auto");
    j["gap_policy"] = to_string(c.resample.gap_policy);
    j["max_gap_steps"] = c.resample.max_gap_steps;
    j["output"] = c.output;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    if (!c.preset.empty()) j["preset"] = c.preset;
    if (c.scenario) j["scenario"] = to_json(*c.scenario);
    return j;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
    const std::string where = "config";
    check_object(j, where,
                 {"command", "inputs", "method", "features", "st", "normalization", "svm",
                  "mapping", "max_set_size", "tolerance_steps", "require_same_direction",
                  "step_seconds", "gap_policy", "max_gap_steps", "output", "seed", "threads",
                  "preset", "scenario"});
    read(j, "command", c.command, where);
    if (j.contains("inputs")) {
        const json& in = j.at("inputs");
        check_object(in, "inputs", {"logger", "weather", "truth", "predicted", "runs"});
        read(in, "logger", c.logger, "inputs");
        read(in, "weather", c.weather, "inputs");
        read(in, "truth", c.truth, "inputs");
        read(in, "predicted", c.predicted, "inputs");
        read(in, "runs", c.runs, "inputs");
    }
    read(j, "method", c.method, where);
    read(j, "features", c.features, where);
    if (j.contains("st")) c.st = st_from_json(j.at("st"), c.st);
    if (j.contains("normalization")) {
        c.normalization = parse_normalization(j.at("normalization").get<std::string>());
    }
    if (j.contains("svm")) c.svm = svm_from_json(j.at("svm"), c.svm);
    if (j.contains("mapping")) c.mapping = parse_outlier_mapping(j.at("mapping").get<std::string>());
    read(j, "max_set_size", c.policy.max_size, where);
    read(j, "tolerance_steps", c.matching.tolerance, where);
    read(j, "require_same_direction", c.matching.require_same_direction, where);
    if (j.contains("step_seconds")) {
        const json& s = j.at("step_seconds");
        if (s.is_string() && s.get<std::string>() == "auto") {
            c.step_seconds.reset();
        } else if (s.is_number_integer()) {
            c.step_seconds = s.get<std::int64_t>();
        } else {
            throw InvalidArgument("config.step_seconds: expected \"auto\" or an integer");
        }
    }
    if (j.contains("gap_policy")) c.resample.gap_policy = parse_gap_policy(j.at("gap_policy").get<std::string>());
    read(j, "max_gap_steps", c.resample.max_gap_steps, where);
    read(j, "output", c.output, where);
    read(j, "seed", c.seed, where);
    read(j, "threads", c.threads, where);
    read(j, "preset", c.preset, where);
    if (j.contains("scenario")) {
        c.scenario = scenario_from_json(j.at("scenario"), c.scenario.value_or(ScenarioConfig{}));
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    return run_config_from_json(read_json_file(path), std::move(base));
}

ordered_json to_json(const ScenarioConfig& c) {
    ordered_json j;
    j["name"] = c.name;
    j["start"] = format_timestamp(c.start);
    j["duration_days"] = c.duration_days;
    j["step_seconds"] = c.step_seconds;
    j["seed"] = c.seed;
    j["ambient"] = {{"mean_c", c.ambient.mean_c},
                    {"amplitude_c", c.ambient.amplitude_c},
                    {"phase_hours", c.ambient.phase_hours},
                    {"noise_std_c", c.ambient.noise_std_c}};
    ordered_json thermal;
    thermal["capacitance_j_per_k"] = c.thermal.capacitance_j_per_k;
    thermal["r_closed_k_per_w"] = c.thermal.r_closed_k_per_w;
    thermal["r_open_k_per_w"] = c.thermal.r_open_k_per_w;
    thermal["internal_gain_w"] = c.thermal.internal_gain_w;
    thermal["internal_gain_noise_w"] = c.thermal.internal_gain_noise_w;
    thermal["initial_indoor_c"] =
        c.thermal.initial_indoor_c ? ordered_json(*c.thermal.initial_indoor_c) : ordered_json(nullptr);
    j["thermal"] = thermal;
    ordered_json schedule;
    schedule["target_open_fraction"] = c.schedule.target_open_fraction;
    schedule["mean_event_count"] = c.schedule.mean_event_count;
    schedule["initial_state"] = c.schedule.initial_state;
    schedule["min_dwell_steps"] = c.schedule.min_dwell_steps;
    schedule["event_hours"] = c.schedule.event_hours;
    j["schedule"] = schedule;
    ordered_json humidity;
    humidity["indoor_mean_pct"] = c.humidity.indoor_mean_pct;
    humidity["ambient_mean_pct"] = c.humidity.ambient_mean_pct;
    humidity["noise_std_pct"] = c.humidity.noise_std_pct;
    humidity["correlation_hours"] = c.humidity.correlation_hours;
    humidity["coupled"] = c.humidity.coupled;
    humidity["coupled_tau_hours"] = c.humidity.coupled_tau_hours;
    j["humidity"] = humidity;
    j["indoor_noise_std_c"] = c.indoor_noise_std_c;
    return j;
}

ScenarioConfig scenario_from_json(const json& j, ScenarioConfig c) {
    const std::string where = "scenario";
    check_object(j, where, {"name", "start", "duration_days", "step_seconds", "seed", "ambient",
                            "thermal", "schedule", "humidity", "indoor_noise_std_c"});
    read(j, "name", c.name, where);
    if (j.contains("start")) c.start = parse_timestamp(j.at("start").get<std::string>());
    read(j, "duration_days", c.duration_days, where);
    read(j, "step_seconds", c.step_seconds, where);
    read(j, "seed", c.seed, where);
    read(j, "indoor_noise_std_c", c.indoor_noise_std_c, where);
    if (j.contains("ambient")) {
        const json& a = j.at("ambient");
        check_object(a, "ambient", {"mean_c", "amplitude_c", "phase_hours", "noise_std_c"});
        read(a, "mean_c", c.ambient.mean_c, "ambient");
        read(a, "amplitude_c", c.ambient.amplitude_c, "ambient");
        read(a, "phase_hours", c.ambient.phase_hours, "ambient");
        read(a, "noise_std_c", c.ambient.noise_std_c, "ambient");
    }
    if (j.contains("thermal")) {
        const json& t = j.at("thermal");
        check_object(t, "thermal", {"capacitance_j_per_k", "r_closed_k_per_w", "r_open_k_per_w",
                                    "internal_gain_w", "internal_gain_noise_w",
                                    "initial_indoor_c"});
        read(t, "capacitance_j_per_k", c.thermal.capacitance_j_per_k, "thermal");
        read(t, "r_closed_k_per_w", c.thermal.r_closed_k_per_w, "thermal");
        read(t, "r_open_k_per_w", c.thermal.r_open_k_per_w, "thermal");
        read(t, "internal_gain_w", c.thermal.internal_gain_w, "thermal");
        read(t, "internal_gain_noise_w", c.thermal.internal_gain_noise_w, "thermal");
        if (t.contains("initial_indoor_c")) {
            const json& v = t.at("initial_indoor_c");
            if (v.is_null()) {
                c.thermal.initial_indoor_c.reset();
            } else {
                c.thermal.initial_indoor_c = v.get<double>();
            }
        }
    }
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        check_object(s, "schedule", {"target_open_fraction", "mean_event_count", "initial_state",
                                     "min_dwell_steps", "event_hours"});
        read(s, "target_open_fraction", c.schedule.target_open_fraction, "schedule");
        read(s, "mean_event_count", c.schedule.mean_event_count, "schedule");
        int initial = c.schedule.initial_state;
        read(s, "initial_state", initial, "schedule");
        if (initial != 0 && initial != 1) {
            throw InvalidArgument("schedule.initial_state must be 0 or 1");
        }
        c.schedule.initial_state = static_cast<std::uint8_t>(initial);
        read(s, "min_dwell_steps", c.schedule.min_dwell_steps, "schedule");
        read(s, "event_hours", c.schedule.event_hours, "schedule");
    }
    if (j.contains("humidity")) {
        const json& h = j.at("humidity");
        check_object(h, "humidity", {"indoor_mean_pct", "ambient_mean_pct", "noise_std_pct",
                                     "correlation_hours", "coupled", "coupled_tau_hours"});
        read(h, "indoor_mean_pct", c.humidity.indoor_mean_pct, "humidity");
        read(h, "ambient_mean_pct", c.humidity.ambient_mean_pct, "humidity");
        read(h, "noise_std_pct", c.humidity.noise_std_pct, "humidity");
        read(h, "correlation_hours", c.humidity.correlation_hours, "humidity");
        read(h, "coupled", c.humidity.coupled, "humidity");
        read(h, "coupled_tau_hours", c.humidity.coupled_tau_hours, "humidity");
    }
    return c;
}

ordered_json to_json(const MetricsReport& r) {
    ordered_json j;
    j["macro_f1"] = number(r.macro_f1);
    j["true_opening_hours"] = number(r.true_opening_hours);
    j["false_opening_hours"] = number(r.false_opening_hours);
    j["hits"] = r.hits;
    j["near_hits"] = r.near_hits;
    j["guesses"] = r.guesses;
    j["actions"] = r.actions;
    j["hits_near_hits_over_guesses"] = number(r.hits_near_hits_over_guesses);
    j["guesses_over_actions"] = number(r.guesses_over_actions);
    j["guesses_over_actions_undefined"] = r.guesses_over_actions_undefined;
    j["confusion"] = {{"tp", r.confusion.tp},
                      {"fp", r.confusion.fp},
                      {"tn", r.confusion.tn},
                      {"fn", r.confusion.fn}};
    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.match_pairs) {
        pairs.push_back({p.guess_index, p.action_index});
    }
    j["match_pairs"] = pairs;
    j["tolerance_steps"] = r.matching.tolerance;
    j["require_same_direction"] = r.matching.require_same_direction;
    return j;
}

ordered_json to_json(const StDiagnostics& d) {
    ordered_json j;
    j["exceedances"] = d.exceedances;
    j["guesses"] = d.guesses;
    j["redundant_guesses"] = d.redundant_guesses;
    j["transitions"] = d.transitions;
    j["threshold_mean"] = number(d.threshold_mean);
    j["threshold_stddev"] = number(d.threshold_stddev);
    j["flat_curvature"] = d.flat_curvature;
    j["leading_fraction"] = number(d.leading_fraction);
    j["initial_state_dominates"] = d.initial_state_dominates;
    return j;
}

ordered_json to_json(const MetricSummary& s) {
    ordered_json j;
    j["count"] = s.count;
    j["mean"] = number(s.mean);
    j["median"] = number(s.median);
    j["min"] = number(s.min);
    j["max"] = number(s.max);
    j["q1"] = number(s.q1);
    j["q3"] = number(s.q3);
    return j;
}

std::string dump(const ordered_json& j) {
    return j.dump(2) + "\n";
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return json::parse(text.str());
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

}  // namespace winop
