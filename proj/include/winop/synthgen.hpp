#pragma once

#include "winop/dataset.hpp"
#include "winop/timeseries.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace winop {

struct AmbientConfig {
    double mean_c = 18.0;
    double amplitude_c = 3.0;
    double phase_hours = 9.0;  // sine crosses the mean upward here, peaks 6 h later
    double noise_std_c = 0.05;
};

/// Single-node envelope: dT/dt = (T_amb - T) / (R C) + q / C, with R switched
/// by the window state.
struct ThermalConfig {
    double capacitance_j_per_k = 2.0e6;
    double r_closed_k_per_w = 3.0 * 3600.0 / 2.0e6;
    double r_open_k_per_w = 1.5 * 3600.0 / 2.0e6;
    double internal_gain_w = 1500.0;
    double internal_gain_noise_w = 0.0;
    std::optional<double> initial_indoor_c;  // defaults to the steady state at t = 0

    [[nodiscard]] double tau_closed_hours() const {
        return r_closed_k_per_w * capacitance_j_per_k / kSecondsPerHour;
    }
    [[nodiscard]] double tau_open_hours() const {
        return r_open_k_per_w * capacitance_j_per_k / kSecondsPerHour;
    }
};

struct ScheduleConfig {
    double target_open_fraction = 0.5;
    double mean_event_count = 6.0;  // transitions over the whole run
    std::uint8_t initial_state = 0;
    int min_dwell_steps = 4;
    // When non-empty, the state toggles at these offsets (hours from start)
    // and the fraction/count targets are ignored.
    std::vector<double> event_hours;
};

struct HumidityConfig {
    double indoor_mean_pct = 55.0;
    double ambient_mean_pct = 65.0;
    double noise_std_pct = 4.0;
    double correlation_hours = 3.0;
    // Indoor RH relaxes toward ambient RH while the window is open.
    bool coupled = false;
    double coupled_tau_hours = 1.0;
};

struct ScenarioConfig {
    std::string name = "custom";
    TimePoint start{};
    double duration_days = 4.0;
    std::int64_t step_seconds = 1800;
    std::uint64_t seed = 1;
    AmbientConfig ambient;
    ThermalConfig thermal;
    ScheduleConfig schedule;
    HumidityConfig humidity;
    double indoor_noise_std_c = 0.1;

    [[nodiscard]] std::size_t sample_count() const;
    [[nodiscard]] Grid grid() const;
    void validate() const;
};

/// Alternating closed/open dwell times. Dwell lengths are drawn from
/// exponentials whose means meet the targets, then rescaled so the realised
/// open fraction matches the target to within one sample.
[[nodiscard]] BinarySeries schedule_events(const ScheduleConfig& schedule, const Grid& grid,
                                           std::uint64_t seed);

/// Integrates the RC model with explicit Euler at the sampling step.
[[nodiscard]] SensorDataset generate(const ScenarioConfig& config);

/// Named scenario mirroring one of the three field experiments (A, B, C).
[[nodiscard]] ScenarioConfig preset(const std::string& name);

/// Pooled two-sample t statistic between indoor and ambient temperature.
[[nodiscard]] double indoor_ambient_t_statistic(const SensorDataset& dataset);

/// Noise-free indoor temperature for the same forcing and schedule.
[[nodiscard]] TimeSeries simulate_indoor(const ScenarioConfig& config,
                                         const BinarySeries& window_state,
                                         std::span<const double> ambient,
                                         std::span<const double> internal_gain);

}  // namespace winop
