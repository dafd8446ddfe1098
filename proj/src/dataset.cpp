#include "winop/dataset.hpp"

namespace winop {

void SensorDataset::validate() const {
    const Grid g = grid();
    require_aligned(g, ambient_temperature.grid());
    if (indoor_humidity) {
        require_aligned(g, indoor_humidity->grid());
    }
    if (ambient_humidity) {
        require_aligned(g, ambient_humidity->grid());
    }
    if (window_state) {
        require_aligned(g, window_state->grid());
    }
}

}  // namespace winop
