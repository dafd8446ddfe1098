#include "winop/synthgen.hpp"

#include "winop/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace winop {

namespace {

// Independent random streams per noise source so that, for example, changing
// the ambient noise level does not reshuffle the event schedule.
enum class Stream : std::uint32_t { schedule = 1, ambient, gain, indoor, rh_ambient, rh_indoor };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

// Integer lengths >= floor_len summing to total, proportional to weights
// (largest-remainder rounding).
std::vector<std::size_t> allocate(std::span<const double> weights, std::size_t total,
                                  std::size_t floor_len) {
    const std::size_t k = weights.size();
    const std::size_t spare = total - floor_len * k;
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> out(k, floor_len);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double share = static_cast<double>(spare) * weights[i] / wsum;
        const auto whole = static_cast<std::size_t>(std::floor(share));
        out[i] += whole;
        used += whole;
        remainders.emplace_back(share - static_cast<double>(whole), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; r < spare - used; ++r) {
        ++out[remainders[r].second];
    }
    return out;
}

std::vector<double> ar1(std::size_t n, double mean, double stddev, double correlation_hours,
                        std::int64_t step, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double phi = std::exp(-static_cast<double>(step) / (correlation_hours * kSecondsPerHour));
    const double innovation = stddev * std::sqrt(1.0 - phi * phi);
    std::vector<double> out(n);
    double dev = stddev * normal(rng);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = mean + dev;
        dev = phi * dev + innovation * normal(rng);
    }
    return out;
}

double clamp_pct(double v) { return std::clamp(v, 0.0, 100.0); }

BinarySeries explicit_schedule(const ScheduleConfig& schedule, const Grid& grid) {
    std::vector<std::uint8_t> states(grid.size, schedule.initial_state);
    std::size_t previous = 0;
    std::uint8_t current = schedule.initial_state;
    for (double hours : schedule.event_hours) {
        const double pos = hours * kSecondsPerHour / static_cast<double>(grid.step);
        const auto idx = static_cast<std::size_t>(std::llround(pos));
        if (pos < 0.0 || idx == 0 || idx >= grid.size || idx <= previous) {
            throw InvalidArgument("explicit window events must be increasing and inside the run");
        }
        current = static_cast<std::uint8_t>(1 - current);
        std::fill(states.begin() + static_cast<std::ptrdiff_t>(idx), states.end(), current);
        previous = idx;
    }
    return BinarySeries(grid, std::move(states));
}

}  // namespace

std::size_t ScenarioConfig::sample_count() const {
    return static_cast<std::size_t>(
        std::llround(duration_days * 86400.0 / static_cast<double>(step_seconds)));
}

Grid ScenarioConfig::grid() const { return Grid{start, step_seconds, sample_count()}; }

void ScenarioConfig::validate() const {
    if (step_seconds <= 0) {
        throw InvalidArgument("step must be positive");
    }
    if (!(duration_days > 0.0) || sample_count() < 10) {
        throw InvalidArgument("scenario must span at least 10 samples");
    }
    const auto& th = thermal;
    if (!(th.capacitance_j_per_k > 0.0) || !(th.r_closed_k_per_w > 0.0) ||
        !(th.r_open_k_per_w > 0.0)) {
        throw InvalidArgument("heat capacity and resistances must be positive");
    }
    if (!(th.r_open_k_per_w < th.r_closed_k_per_w)) {
        throw InvalidArgument("an open window must lower the envelope resistance (R_open < R_closed)");
    }
    const double frac = schedule.target_open_fraction;
    if (!(frac >= 0.0 && frac <= 1.0)) {
        throw InvalidArgument("target open fraction must lie in [0, 1]");
    }
    if (schedule.initial_state > 1) {
        throw InvalidArgument("initial window state must be 0 or 1");
    }
    if (indoor_noise_std_c < 0.0 || ambient.noise_std_c < 0.0 || th.internal_gain_noise_w < 0.0 ||
        humidity.noise_std_pct < 0.0) {
        throw InvalidArgument("noise levels must be non-negative");
    }
    if (!(humidity.correlation_hours > 0.0) || !(humidity.coupled_tau_hours > 0.0)) {
        throw InvalidArgument("humidity time scales must be positive");
    }
    const double stable = 0.5 * th.r_open_k_per_w * th.capacitance_j_per_k;
    if (static_cast<double>(step_seconds) > stable) {
        std::ostringstream msg;
        msg << "explicit Euler unstable: step " << step_seconds
            << " s exceeds 0.5 * R_open * C = " << stable << " s";
        throw InvalidArgument(msg.str());
    }
}

BinarySeries schedule_events(const ScheduleConfig& schedule, const Grid& grid,
                             std::uint64_t seed) {
    if (!schedule.event_hours.empty()) {
        return explicit_schedule(schedule, grid);
    }
    const double frac = schedule.target_open_fraction;
    if (!(frac >= 0.0 && frac <= 1.0)) {
        throw InvalidArgument("target open fraction must lie in [0, 1]");
    }
    const std::size_t n = grid.size;
    const auto open_total = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
    if (open_total == 0 || open_total == n) {
        return BinarySeries(grid, std::vector<std::uint8_t>(n, open_total == n ? 1 : 0));
    }

    const auto events = static_cast<std::size_t>(std::llround(schedule.mean_event_count));
    const std::size_t segments = events + 1;
    const std::size_t first_kind = (segments + 1) / 2;
    const std::size_t second_kind = segments / 2;
    const std::size_t open_segments = schedule.initial_state == 1 ? first_kind : second_kind;
    const std::size_t closed_segments = segments - open_segments;
    if (open_segments == 0 || closed_segments == 0) {
        throw InvalidArgument("event count " + std::to_string(events) +
                              " is too low to reach an open fraction strictly between 0 and 1");
    }
    const auto min_dwell = static_cast<std::size_t>(std::max(1, schedule.min_dwell_steps));
    const std::size_t closed_total = n - open_total;
    if (open_total < min_dwell * open_segments || closed_total < min_dwell * closed_segments) {
        throw InvalidArgument("cannot fit " + std::to_string(events) + " events with " +
                              std::to_string(min_dwell) + "-sample minimum dwell into " +
                              std::to_string(n) + " samples at open fraction " +
                              std::to_string(frac));
    }

    auto rng = make_engine(seed, Stream::schedule);
    const double open_mean = static_cast<double>(open_total) / static_cast<double>(open_segments);
    const double closed_mean =
        static_cast<double>(closed_total) / static_cast<double>(closed_segments);
    std::exponential_distribution<double> open_dwell(1.0 / open_mean);
    std::exponential_distribution<double> closed_dwell(1.0 / closed_mean);

    std::vector<double> open_draws;
    std::vector<double> closed_draws;
    std::uint8_t state = schedule.initial_state;
    for (std::size_t s = 0; s < segments; ++s) {
        if (state == 1) {
            open_draws.push_back(open_dwell(rng));
        } else {
            closed_draws.push_back(closed_dwell(rng));
        }
        state = static_cast<std::uint8_t>(1 - state);
    }
    const auto open_len = allocate(open_draws, open_total, min_dwell);
    const auto closed_len = allocate(closed_draws, closed_total, min_dwell);

    std::vector<std::uint8_t> states;
    states.reserve(n);
    state = schedule.initial_state;
    std::size_t oi = 0;
    std::size_t ci = 0;
    for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t len = state == 1 ? open_len[oi++] : closed_len[ci++];
        states.insert(states.end(), len, state);
        state = static_cast<std::uint8_t>(1 - state);
    }
    return BinarySeries(grid, std::move(states));
}

TimeSeries simulate_indoor(const ScenarioConfig& config, const BinarySeries& window_state,
                           std::span<const double> ambient,
                           std::span<const double> internal_gain) {
    const Grid grid = window_state.grid();
    const auto& th = config.thermal;
    const double dt = static_cast<double>(grid.step);
    const double c = th.capacitance_j_per_k;
    auto resistance = [&](std::size_t i) {
        return window_state[i] == 1 ? th.r_open_k_per_w : th.r_closed_k_per_w;
    };

    std::vector<double> indoor(grid.size);
    indoor[0] = th.initial_indoor_c.value_or(
        config.ambient.mean_c +
        config.ambient.amplitude_c *
            std::sin(-2.0 * std::numbers::pi * config.ambient.phase_hours / 24.0) +
        th.internal_gain_w * resistance(0));
    for (std::size_t i = 0; i + 1 < grid.size; ++i) {
        const double flow = (ambient[i] - indoor[i]) / (resistance(i) * c) + internal_gain[i] / c;
        indoor[i + 1] = indoor[i] + dt * flow;
    }
    return TimeSeries(grid.start, grid.step, std::move(indoor));
}

SensorDataset generate(const ScenarioConfig& config) {
    config.validate();
    const Grid grid = config.grid();
    const std::size_t n = grid.size;

    BinarySeries window = schedule_events(config.schedule, grid, config.seed);

    auto amb_rng = make_engine(config.seed, Stream::ambient);
    auto gain_rng = make_engine(config.seed, Stream::gain);
    auto indoor_rng = make_engine(config.seed, Stream::indoor);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> ambient(n);
    std::vector<double> gain(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hours = static_cast<double>(i) * grid.step_hours();
        ambient[i] = config.ambient.mean_c +
                     config.ambient.amplitude_c *
                         std::sin(2.0 * std::numbers::pi * (hours - config.ambient.phase_hours) /
                                  24.0) +
                     config.ambient.noise_std_c * normal(amb_rng);
        gain[i] = config.thermal.internal_gain_w +
                  config.thermal.internal_gain_noise_w * normal(gain_rng);
    }

    const TimeSeries indoor = simulate_indoor(config, window, ambient, gain);
    std::vector<double> measured(n);
    for (std::size_t i = 0; i < n; ++i) {
        measured[i] = indoor[i] + config.indoor_noise_std_c * normal(indoor_rng);
    }

    const auto& hum = config.humidity;
    auto rh_amb_rng = make_engine(config.seed, Stream::rh_ambient);
    auto rh_in_rng = make_engine(config.seed, Stream::rh_indoor);
    std::vector<double> rh_amb = ar1(n, hum.ambient_mean_pct, hum.noise_std_pct,
                                     hum.correlation_hours, grid.step, rh_amb_rng);
    std::vector<double> rh_in = ar1(n, hum.indoor_mean_pct, hum.noise_std_pct,
                                    hum.correlation_hours, grid.step, rh_in_rng);
    if (hum.coupled) {
        const double keep = std::exp(-static_cast<double>(grid.step) /
                                     (hum.coupled_tau_hours * kSecondsPerHour));
        double offset = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double target = window[i] == 1 ? rh_amb[i] - hum.indoor_mean_pct : 0.0;
            offset = keep * offset + (1.0 - keep) * target;
            rh_in[i] += offset;
        }
    }
    std::transform(rh_amb.begin(), rh_amb.end(), rh_amb.begin(), clamp_pct);
    std::transform(rh_in.begin(), rh_in.end(), rh_in.begin(), clamp_pct);

    SensorDataset ds{
        TimeSeries(grid.start, grid.step, std::move(measured)),
        TimeSeries(grid.start, grid.step, std::move(ambient)),
        TimeSeries(grid.start, grid.step, std::move(rh_in)),
        TimeSeries(grid.start, grid.step, std::move(rh_amb)),
        std::move(window),
        {"synthetic:" + config.name + ":seed=" + std::to_string(config.seed)},
    };
    return ds;
}

ScenarioConfig preset(const std::string& name) {
    using namespace std::chrono;
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.step_seconds = 1800;
    cfg.indoor_noise_std_c = 0.1;

    // Time constants in hours; the gain sets the closed-window steady offset
    // above ambient (offset = q * R_closed).
    auto set_envelope = [&cfg](double tau_closed_h, double tau_open_h, double closed_offset_c) {
        const double c = cfg.thermal.capacitance_j_per_k;
        cfg.thermal.r_closed_k_per_w = tau_closed_h * kSecondsPerHour / c;
        cfg.thermal.r_open_k_per_w = tau_open_h * kSecondsPerHour / c;
        cfg.thermal.internal_gain_w = closed_offset_c / cfg.thermal.r_closed_k_per_w;
    };

    if (name == "A") {
        cfg.start = sys_days{year{2023} / July / 20};
        cfg.duration_days = 4.0;
        cfg.schedule.target_open_fraction = 0.587;
        cfg.schedule.mean_event_count = 6;
        cfg.ambient.mean_c = 18.0;
        cfg.ambient.amplitude_c = 3.0;
        set_envelope(3.0, 1.5, 10.0);
    } else if (name == "B") {
        cfg.start = sys_days{year{2023} / July / 27};
        // 329.0 open hours at 94.8 % implies 347 recorded hours.
        cfg.duration_days = 14.46;
        cfg.schedule.target_open_fraction = 0.948;
        cfg.schedule.mean_event_count = 10;
        cfg.ambient.mean_c = 18.0;
        cfg.ambient.amplitude_c = 3.0;
        set_envelope(3.0, 1.5, 14.0);
    } else if (name == "C") {
        cfg.start = sys_days{year{2023} / September / 8};
        cfg.duration_days = 3.0;
        cfg.schedule.target_open_fraction = 0.779;
        cfg.schedule.mean_event_count = 4;
        cfg.ambient.mean_c = 20.0;
        cfg.ambient.amplitude_c = 3.0;
        set_envelope(3.0, 1.5, 3.0);
    } else {
        throw InvalidArgument("unknown preset '" + name + "' (expected A, B or C)");
    }
    return cfg;
}

double indoor_ambient_t_statistic(const SensorDataset& dataset) {
    const auto a = dataset.indoor_temperature.values();
    const auto b = dataset.ambient_temperature.values();
    const Moments ma = moments(a);
    const Moments mb = moments(b);
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    // moments() is the population variance; convert to the unbiased form.
    const double va = ma.stddev * ma.stddev * na / (na - 1.0);
    const double vb = mb.stddev * mb.stddev * nb / (nb - 1.0);
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
    if (!(se > 0.0)) {
        throw DegenerateInput("t statistic undefined for constant series");
    }
    return (ma.mean - mb.mean) / se;
}

}  // namespace winop
