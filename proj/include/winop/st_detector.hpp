#pragma once

#include "winop/timeseries.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace winop {

/// How neighbouring threshold exceedances are merged into a single guess.
enum class CollapseMode {
    // Exceedances of either sign chained within the separation form one
    // event; the largest deviation decides its direction. A window event's
    // curvature response is a kink followed by an opposite-sign relaxation,
    // so this keeps one event from cancelling itself.
    any_sign,
    // Only runs of same-sign exceedances are merged.
    same_sign,
};

struct StConfig {
    Seconds half_life{12.0 * kSecondsPerHour};
    double sigma_threshold = 2.0;
    std::uint8_t initial_state = 0;
    int min_event_separation = 2;  // timesteps
    // Default mapping: negative curvature (sharp cooling onset) opens the
    // window. Heating-dominated conditions reverse the physics.
    bool invert_signs = false;
    CollapseMode collapse = CollapseMode::any_sign;

    void validate() const;
};

/// Signed guesses G(t): +1 opening, -1 closing, 0 nothing.
struct GuessSeries {
    Grid grid;
    std::vector<std::int8_t> entries;

    [[nodiscard]] std::size_t nonzero() const;
};

struct StDiagnostics {
    std::size_t exceedances = 0;        // before collapse
    std::size_t guesses = 0;            // after collapse
    std::size_t redundant_guesses = 0;  // guesses that repeated the current state
    std::size_t transitions = 0;
    double threshold_mean = 0.0;
    double threshold_stddev = 0.0;
    bool flat_curvature = false;        // d2 had no variance; no guesses possible
    // Fraction of the series before the first surviving guess. Above 0.3 the
    // initial-state assumption dominates the metrics.
    double leading_fraction = 1.0;
    bool initial_state_dominates = false;
};

struct DetectionResult {
    BinarySeries state;        // I(t)
    GuessSeries guesses;       // G(t), after collapse
    TimeSeries smoothed;       // EWM of the input
    TimeSeries residual;       // input minus smoothed
    TimeSeries first_derivative;
    TimeSeries second_derivative;
    StDiagnostics diagnostics;
};

/// Raw per-timestep exceedances of mean +/- k * std, before any collapsing.
[[nodiscard]] GuessSeries threshold_exceedances(const TimeSeries& d2, const StConfig& config);

/// Exceedances collapsed per config.collapse / config.min_event_separation.
[[nodiscard]] GuessSeries threshold_guesses(const TimeSeries& d2, const StConfig& config);

/// Forward-fill signed guesses into a window-state series.
[[nodiscard]] BinarySeries interpolate_state(const GuessSeries& guesses, const StConfig& config);

/// Full smoothing-technique pipeline on indoor temperature.
[[nodiscard]] DetectionResult detect(const TimeSeries& indoor_temperature, const StConfig& config);

[[nodiscard]] std::string to_string(CollapseMode mode);
[[nodiscard]] CollapseMode parse_collapse_mode(const std::string& text);

}  // namespace winop
