#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace winop {

using TimePoint = std::chrono::sys_seconds;
using Seconds = std::chrono::duration<double>;

inline constexpr double kSecondsPerHour = 3600.0;

/// Uniform sampling grid shared by every aligned series.
struct Grid {
    TimePoint start{};
    std::int64_t step = 0;  // seconds
    std::size_t size = 0;

    [[nodiscard]] TimePoint time_at(std::size_t i) const {
        return start + std::chrono::seconds(step * static_cast<std::int64_t>(i));
    }
    [[nodiscard]] double step_hours() const { return static_cast<double>(step) / kSecondsPerHour; }

    bool operator==(const Grid&) const = default;
};

/// Throws AlignmentError naming the first mismatching field (start, step or length).
void require_aligned(const Grid& a, const Grid& b);

/// Uniformly sampled real-valued series. Values are finite and non-empty;
/// the unit is carried by the caller.
class TimeSeries {
public:
    TimeSeries(TimePoint start, std::int64_t step_seconds, std::vector<double> values);

    [[nodiscard]] TimePoint start() const noexcept { return start_; }
    [[nodiscard]] std::int64_t step() const noexcept { return step_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] Grid grid() const { return {start_, step_, values_.size()}; }
    [[nodiscard]] double step_hours() const { return grid().step_hours(); }

    /// Same grid, new values (validated).
    [[nodiscard]] TimeSeries with_values(std::vector<double> values) const;

    bool operator==(const TimeSeries&) const = default;

private:
    TimePoint start_;
    std::int64_t step_;
    std::vector<double> values_;
};

/// Window-state series over {0 = closed, 1 = open}.
class BinarySeries {
public:
    BinarySeries(TimePoint start, std::int64_t step_seconds, std::vector<std::uint8_t> states);
    BinarySeries(const Grid& grid, std::vector<std::uint8_t> states);

    [[nodiscard]] TimePoint start() const noexcept { return start_; }
    [[nodiscard]] std::int64_t step() const noexcept { return step_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] std::span<const std::uint8_t> states() const noexcept { return states_; }
    [[nodiscard]] std::uint8_t operator[](std::size_t i) const { return states_[i]; }
    [[nodiscard]] Grid grid() const { return {start_, step_, states_.size()}; }
    [[nodiscard]] double step_hours() const { return grid().step_hours(); }

    [[nodiscard]] BinarySeries complement() const;
    [[nodiscard]] double open_fraction() const;

    bool operator==(const BinarySeries&) const = default;

private:
    TimePoint start_;
    std::int64_t step_;
    std::vector<std::uint8_t> states_;
};

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

[[nodiscard]] Moments moments(std::span<const double> values);

/// Smoothing factor for a half-life expressed in seconds: 1 - 2^(-step/half_life).
[[nodiscard]] double ewm_alpha(std::int64_t step_seconds, Seconds half_life);

/// Recursive exponentially weighted mean, s0 = x0, s_t = a x_t + (1 - a) s_{t-1}.
[[nodiscard]] TimeSeries ewm_smooth(const TimeSeries& series, Seconds half_life);

/// Central differences inside, one-sided at both ends, in units per hour.
[[nodiscard]] TimeSeries derivative(const TimeSeries& series);

enum class Normalization { zscore, minmax };

/// z-score by default (population std). Throws DegenerateInput for a constant series.
[[nodiscard]] TimeSeries normalize(const TimeSeries& series,
                                   Normalization kind = Normalization::zscore);

[[nodiscard]] TimeSeries subtract(const TimeSeries& a, const TimeSeries& b);

struct Observation {
    TimePoint time;
    double value = 0.0;
};

enum class GapPolicy { linear_interpolate, fail };

struct ResampleOptions {
    GapPolicy gap_policy = GapPolicy::fail;
    // Longest run of missing samples bridged silently under GapPolicy::fail.
    // Missing samples are counted at the coarser of the target step and the
    // source's median cadence, so an hourly station feeding a 5-minute grid
    // is not mistaken for a gap.
    int max_gap_steps = 4;
};

/// Linear interpolation onto a grid starting at the first observation and
/// ending at or before the last one.
[[nodiscard]] TimeSeries resample(std::span<const Observation> observations,
                                  std::int64_t step_seconds,
                                  const ResampleOptions& options = {});

/// Same as resample() but onto an explicit grid, which must lie inside the
/// observed time range.
[[nodiscard]] TimeSeries resample_onto(std::span<const Observation> observations,
                                       const Grid& grid,
                                       const ResampleOptions& options = {});

[[nodiscard]] std::string to_string(Normalization kind);
[[nodiscard]] Normalization parse_normalization(const std::string& text);
[[nodiscard]] std::string to_string(GapPolicy policy);
[[nodiscard]] GapPolicy parse_gap_policy(const std::string& text);

}  // namespace winop
