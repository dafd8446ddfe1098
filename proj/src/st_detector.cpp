#include "winop/st_detector.hpp"

#include "winop/error.hpp"

#include <algorithm>
#include <cmath>

namespace winop {

namespace {

struct Threshold {
    double mean;
    double stddev;
};

bool is_flat(std::span<const double> values, const Moments& m) {
    double peak = 1.0;
    for (double v : values) {
        peak = std::max(peak, std::abs(v));
    }
    return m.stddev <= 1e-12 * peak;
}

Threshold curvature_threshold(const TimeSeries& d2) {
    const Moments m = moments(d2.values());
    if (is_flat(d2.values(), m)) {
        throw DegenerateInput("second derivative has zero variance; no threshold can be set");
    }
    return {m.mean, m.stddev};
}

GuessSeries exceedances_with(const TimeSeries& d2, const StConfig& config, Threshold th) {
    const double band = config.sigma_threshold * th.stddev;
    const std::int8_t open = config.invert_signs ? -1 : 1;
    GuessSeries g{d2.grid(), std::vector<std::int8_t>(d2.size(), 0)};
    for (std::size_t t = 0; t < d2.size(); ++t) {
        if (d2[t] < th.mean - band) {
            g.entries[t] = open;
        } else if (d2[t] > th.mean + band) {
            g.entries[t] = static_cast<std::int8_t>(-open);
        }
    }
    return g;
}

GuessSeries collapse(const GuessSeries& raw, const TimeSeries& d2, const StConfig& config,
                     double mean) {
    GuessSeries out{raw.grid, std::vector<std::int8_t>(raw.entries.size(), 0)};
    const auto sep = static_cast<std::size_t>(config.min_event_separation);

    auto strength = [&](std::size_t t) { return std::abs(d2[t] - mean); };

    // One pass per sign in same_sign mode, one pass over everything otherwise.
    const std::vector<std::int8_t> passes =
        config.collapse == CollapseMode::same_sign ? std::vector<std::int8_t>{1, -1}
                                                   : std::vector<std::int8_t>{0};
    for (const std::int8_t sign : passes) {
        bool open_cluster = false;
        std::size_t last = 0;
        std::size_t best = 0;
        for (std::size_t t = 0; t < raw.entries.size(); ++t) {
            const std::int8_t e = raw.entries[t];
            if (e == 0 || (sign != 0 && e != sign)) {
                continue;
            }
            if (open_cluster && t - last <= sep) {
                if (strength(t) > strength(best)) {
                    best = t;
                }
            } else {
                if (open_cluster) {
                    out.entries[best] = raw.entries[best];
                }
                open_cluster = true;
                best = t;
            }
            last = t;
        }
        if (open_cluster) {
            out.entries[best] = raw.entries[best];
        }
    }
    return out;
}

}  // namespace

void StConfig::validate() const {
    if (!(half_life.count() > 0.0)) {
        throw InvalidArgument("half-life must be positive");
    }
    if (!(sigma_threshold > 0.0) || !std::isfinite(sigma_threshold)) {
        throw InvalidArgument("sigma threshold must be positive");
    }
    if (initial_state > 1) {
        throw InvalidArgument("initial state must be 0 or 1");
    }
    if (min_event_separation < 0) {
        throw InvalidArgument("minimum event separation must be non-negative");
    }
}

std::size_t GuessSeries::nonzero() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](std::int8_t e) { return e != 0; }));
}

GuessSeries threshold_exceedances(const TimeSeries& d2, const StConfig& config) {
    config.validate();
    return exceedances_with(d2, config, curvature_threshold(d2));
}

GuessSeries threshold_guesses(const TimeSeries& d2, const StConfig& config) {
    config.validate();
    const Threshold th = curvature_threshold(d2);
    return collapse(exceedances_with(d2, config, th), d2, config, th.mean);
}

BinarySeries interpolate_state(const GuessSeries& guesses, const StConfig& config) {
    config.validate();
    if (guesses.entries.size() != guesses.grid.size) {
        throw AlignmentError("length", "guess entries do not match their grid");
    }
    std::vector<std::uint8_t> state(guesses.entries.size());
    std::uint8_t current = config.initial_state;
    for (std::size_t t = 0; t < state.size(); ++t) {
        const std::int8_t g = guesses.entries[t];
        if (g > 0) {
            current = 1;
        } else if (g < 0) {
            current = 0;
        }
        state[t] = current;
    }
    return BinarySeries(guesses.grid, std::move(state));
}

DetectionResult detect(const TimeSeries& indoor_temperature, const StConfig& config) {
    config.validate();
    if (indoor_temperature.size() < 10) {
        throw InvalidArgument("detection needs at least 10 samples, got " +
                              std::to_string(indoor_temperature.size()));
    }

    TimeSeries smoothed = ewm_smooth(indoor_temperature, config.half_life);
    TimeSeries residual = subtract(indoor_temperature, smoothed);
    TimeSeries d1 = derivative(residual);
    TimeSeries d2 = derivative(d1);

    StDiagnostics diag;
    GuessSeries guesses{d2.grid(), std::vector<std::int8_t>(d2.size(), 0)};
    const Moments m = moments(d2.values());
    diag.threshold_mean = m.mean;
    diag.threshold_stddev = m.stddev;
    if (is_flat(d2.values(), m)) {
        // A signal without curvature carries no events.
        diag.flat_curvature = true;
    } else {
        const Threshold th{m.mean, m.stddev};
        const GuessSeries raw = exceedances_with(d2, config, th);
        diag.exceedances = raw.nonzero();
        guesses = collapse(raw, d2, config, th.mean);
    }
    diag.guesses = guesses.nonzero();

    BinarySeries state = interpolate_state(guesses, config);
    for (std::size_t t = 1; t < state.size(); ++t) {
        diag.transitions += state[t] != state[t - 1] ? 1 : 0;
    }
    // The first sample has no predecessor; a guess there that differs from
    // the initial state still changes the state once.
    if (state[0] != config.initial_state) {
        ++diag.transitions;
    }
    diag.redundant_guesses = diag.guesses - diag.transitions;

    const auto first = std::find_if(guesses.entries.begin(), guesses.entries.end(),
                                    [](std::int8_t e) { return e != 0; });
    diag.leading_fraction = static_cast<double>(first - guesses.entries.begin()) /
                            static_cast<double>(guesses.entries.size());
    diag.initial_state_dominates = diag.leading_fraction > 0.3;

    return DetectionResult{std::move(state), std::move(guesses), std::move(smoothed),
                           std::move(residual), std::move(d1),     std::move(d2),
                           diag};
}

std::string to_string(CollapseMode mode) {
    return mode == CollapseMode::any_sign ? "any_sign" : "same_sign";
}

CollapseMode parse_collapse_mode(const std::string& text) {
    if (text == "any_sign") return CollapseMode::any_sign;
    if (text == "same_sign") return CollapseMode::same_sign;
    throw InvalidArgument("unknown collapse mode '" + text + "' (expected any_sign or same_sign)");
}

}  // namespace winop
