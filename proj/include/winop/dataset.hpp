#pragma once

#include "winop/timeseries.hpp"

#include <optional>
#include <string>
#include <vector>

namespace winop {

/// Aligned sensor bundle. Relative humidity is optional because some
/// loggers only record temperature; the window state is present only for
/// generated or labelled data.
struct SensorDataset {
    TimeSeries indoor_temperature;   // T_meas, degC
    TimeSeries ambient_temperature;  // T_amb, degC
    std::optional<TimeSeries> indoor_humidity;   // RH_meas, %
    std::optional<TimeSeries> ambient_humidity;  // RH_amb, %
    std::optional<BinarySeries> window_state;    // W, ground truth
    std::vector<std::string> provenance;

    [[nodiscard]] Grid grid() const { return indoor_temperature.grid(); }

    /// Throws AlignmentError when any member series is off-grid.
    void validate() const;
};

}  // namespace winop
