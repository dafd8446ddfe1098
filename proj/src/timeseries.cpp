#include "winop/timeseries.hpp"

#include "winop/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace winop {

namespace {

std::string format_time(TimePoint t) {
    return std::to_string(t.time_since_epoch().count()) + "s";
}

void validate_grid_params(std::int64_t step, std::size_t size) {
    if (step <= 0) {
        throw InvalidArgument("sampling step must be positive, got " + std::to_string(step));
    }
    if (size == 0) {
        throw InvalidArgument("series must not be empty");
    }
}

}  // namespace

void require_aligned(const Grid& a, const Grid& b) {
    if (a.start != b.start) {
        throw AlignmentError("start", format_time(a.start) + " vs " + format_time(b.start));
    }
    if (a.step != b.step) {
        throw AlignmentError("step", std::to_string(a.step) + " vs " + std::to_string(b.step));
    }
    if (a.size != b.size) {
        throw AlignmentError("length", std::to_string(a.size) + " vs " + std::to_string(b.size));
    }
}

TimeSeries::TimeSeries(TimePoint start, std::int64_t step_seconds, std::vector<double> values)
    : start_(start), step_(step_seconds), values_(std::move(values)) {
    validate_grid_params(step_, values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InvalidArgument("non-finite value at index " + std::to_string(i));
        }
    }
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    if (values.size() != values_.size()) {
        throw AlignmentError("length", std::to_string(values.size()) + " vs " +
                                           std::to_string(values_.size()));
    }
    return TimeSeries(start_, step_, std::move(values));
}

BinarySeries::BinarySeries(TimePoint start, std::int64_t step_seconds,
                           std::vector<std::uint8_t> states)
    : start_(start), step_(step_seconds), states_(std::move(states)) {
    validate_grid_params(step_, states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i] > 1) {
            throw InvalidArgument("window state must be 0 or 1 at index " + std::to_string(i));
        }
    }
}

BinarySeries::BinarySeries(const Grid& grid, std::vector<std::uint8_t> states)
    : BinarySeries(grid.start, grid.step, std::move(states)) {
    if (states_.size() != grid.size) {
        throw AlignmentError("length", std::to_string(states_.size()) + " vs " +
                                           std::to_string(grid.size));
    }
}

BinarySeries BinarySeries::complement() const {
    std::vector<std::uint8_t> flipped(states_.size());
    std::transform(states_.begin(), states_.end(), flipped.begin(),
                   [](std::uint8_t s) { return static_cast<std::uint8_t>(1 - s); });
    return BinarySeries(start_, step_, std::move(flipped));
}

double BinarySeries::open_fraction() const {
    const auto open = std::count(states_.begin(), states_.end(), std::uint8_t{1});
    return static_cast<double>(open) / static_cast<double>(states_.size());
}

Moments moments(std::span<const double> values) {
    // Welford; stable for long series with a large offset.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double x : values) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    if (n == 0) {
        return {};
    }
    return {mean, std::sqrt(m2 / static_cast<double>(n))};
}

double ewm_alpha(std::int64_t step_seconds, Seconds half_life) {
    if (!(half_life.count() > 0.0) || !std::isfinite(half_life.count())) {
        throw InvalidArgument("EWM half-life must be positive, got " +
                              std::to_string(half_life.count()) + " s");
    }
    if (step_seconds <= 0) {
        throw InvalidArgument("sampling step must be positive");
    }
    return 1.0 - std::exp2(-static_cast<double>(step_seconds) / half_life.count());
}

TimeSeries ewm_smooth(const TimeSeries& series, Seconds half_life) {
    const double alpha = ewm_alpha(series.step(), half_life);
    const auto x = series.values();
    std::vector<double> out(x.size());
    out[0] = x[0];
    for (std::size_t t = 1; t < x.size(); ++t) {
        out[t] = alpha * x[t] + (1.0 - alpha) * out[t - 1];
    }
    return series.with_values(std::move(out));
}

TimeSeries derivative(const TimeSeries& series) {
    const auto x = series.values();
    const std::size_t n = x.size();
    if (n < 3) {
        throw InvalidArgument("derivative needs at least 3 points, got " + std::to_string(n));
    }
    const double dt = series.step_hours();
    std::vector<double> d(n);
    d[0] = (x[1] - x[0]) / dt;
    for (std::size_t t = 1; t + 1 < n; ++t) {
        d[t] = (x[t + 1] - x[t - 1]) / (2.0 * dt);
    }
    d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
    return series.with_values(std::move(d));
}

TimeSeries normalize(const TimeSeries& series, Normalization kind) {
    const auto x = series.values();
    const double scale_ref =
        std::max(1.0, std::abs(*std::max_element(x.begin(), x.end(),
                                                  [](double a, double b) {
                                                      return std::abs(a) < std::abs(b);
                                                  })));
    std::vector<double> out(x.size());
    if (kind == Normalization::zscore) {
        const Moments m = moments(x);
        if (m.stddev <= 1e-12 * scale_ref) {
            throw DegenerateInput("cannot z-score normalize a constant series (std = 0)");
        }
        std::transform(x.begin(), x.end(), out.begin(),
                       [&](double v) { return (v - m.mean) / m.stddev; });
    } else {
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        const double range = *hi - *lo;
        if (range <= 1e-12 * scale_ref) {
            throw DegenerateInput("cannot min-max normalize a constant series (range = 0)");
        }
        const double low = *lo;
        std::transform(x.begin(), x.end(), out.begin(),
                       [&](double v) { return (v - low) / range; });
    }
    return series.with_values(std::move(out));
}

TimeSeries subtract(const TimeSeries& a, const TimeSeries& b) {
    require_aligned(a.grid(), b.grid());
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return a.with_values(std::move(out));
}

namespace {

void check_sorted(std::span<const Observation> obs) {
    if (obs.size() < 2) {
        throw InvalidArgument("resampling needs at least 2 observations, got " +
                              std::to_string(obs.size()));
    }
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i].time <= obs[i - 1].time) {
            throw InvalidArgument("observations not strictly time-sorted at index " +
                                  std::to_string(i));
        }
        if (!std::isfinite(obs[i].value) || !std::isfinite(obs[i - 1].value)) {
            throw InvalidArgument("non-finite observation near index " + std::to_string(i));
        }
    }
}

std::int64_t median_interval(std::span<const Observation> obs) {
    std::vector<std::int64_t> dts(obs.size() - 1);
    for (std::size_t i = 1; i < obs.size(); ++i) {
        dts[i - 1] = (obs[i].time - obs[i - 1].time).count();
    }
    auto mid = dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2);
    std::nth_element(dts.begin(), mid, dts.end());
    return *mid;
}

void check_gaps(std::span<const Observation> obs, std::int64_t step,
                const ResampleOptions& options) {
    if (options.gap_policy != GapPolicy::fail) {
        return;
    }
    const std::int64_t cadence = std::max(step, median_interval(obs));
    const std::int64_t limit = cadence * (static_cast<std::int64_t>(options.max_gap_steps) + 1);
    for (std::size_t i = 1; i < obs.size(); ++i) {
        const auto dt = (obs[i].time - obs[i - 1].time).count();
        if (dt > limit) {
            std::ostringstream msg;
            msg << "gap of " << dt << " s between observations " << i - 1 << " and " << i
                << " exceeds " << options.max_gap_steps << " missing steps of " << cadence
                << " s";
            throw GapError(msg.str());
        }
    }
}

}  // namespace

TimeSeries resample_onto(std::span<const Observation> observations, const Grid& grid,
                         const ResampleOptions& options) {
    check_sorted(observations);
    validate_grid_params(grid.step, grid.size);
    if (grid.start < observations.front().time ||
        grid.time_at(grid.size - 1) > observations.back().time) {
        throw InvalidArgument("resampling grid extends beyond the observed time range");
    }
    check_gaps(observations, grid.step, options);

    std::vector<double> out(grid.size);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < grid.size; ++k) {
        const TimePoint t = grid.time_at(k);
        while (seg + 2 < observations.size() && observations[seg + 1].time <= t) {
            ++seg;
        }
        const Observation& a = observations[seg];
        const Observation& b = observations[seg + 1];
        const double span = static_cast<double>((b.time - a.time).count());
        const double offset = static_cast<double>((t - a.time).count());
        out[k] = a.value + (b.value - a.value) * (offset / span);
    }
    return TimeSeries(grid.start, grid.step, std::move(out));
}

TimeSeries resample(std::span<const Observation> observations, std::int64_t step_seconds,
                    const ResampleOptions& options) {
    check_sorted(observations);
    if (step_seconds <= 0) {
        throw InvalidArgument("sampling step must be positive");
    }
    const auto total = (observations.back().time - observations.front().time).count();
    const auto count = static_cast<std::size_t>(total / step_seconds) + 1;
    return resample_onto(observations, Grid{observations.front().time, step_seconds, count},
                         options);
}

std::string to_string(Normalization kind) {
    return kind == Normalization::zscore ? "zscore" : "minmax";
}

Normalization parse_normalization(const std::string& text) {
    if (text == "zscore") return Normalization::zscore;
    if (text == "minmax") return Normalization::minmax;
    throw InvalidArgument("unknown normalization '" + text + "' (expected zscore or minmax)");
}

std::string to_string(GapPolicy policy) {
    return policy == GapPolicy::fail ? "fail" : "linear_interpolate";
}

GapPolicy parse_gap_policy(const std::string& text) {
    if (text == "fail") return GapPolicy::fail;
    if (text == "linear_interpolate") return GapPolicy::linear_interpolate;
    throw InvalidArgument("unknown gap policy '" + text +
                          "' (expected fail or linear_interpolate)");
}

}  // namespace winop
