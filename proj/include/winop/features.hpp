#pragma once

#include "winop/dataset.hpp"

#include <span>
#include <string>
#include <vector>

namespace winop {

/// Engineered base features. The humidity half mirrors the temperature half.
enum class FeatureId {
    t_amb,
    t_meas,
    dt_meas,
    dt_amb,
    t_amb_minus_t_meas,
    t_meas_minus_dt_meas,
    rh_amb,
    rh_meas,
    drh_meas,
    drh_amb,
    rh_amb_minus_rh_meas,
    rh_meas_minus_drh_meas,
};

/// All twelve identifiers in canonical order.
[[nodiscard]] std::span<const FeatureId> base_vocabulary();

[[nodiscard]] std::string to_string(FeatureId id);
[[nodiscard]] FeatureId parse_feature(const std::string& name);
[[nodiscard]] bool uses_humidity(FeatureId id);

struct FeatureSet {
    std::string name;
    std::vector<FeatureId> features;

    /// Builds a set from identifiers such as "T_meas+dT_meas" or a list.
    static FeatureSet parse(const std::string& spec);
    static FeatureSet of(std::vector<FeatureId> features);

    void validate() const;
    bool operator==(const FeatureSet&) const = default;
};

/// Row-major design matrix, one row per timestep, each column z-scored.
struct FeatureMatrix {
    Grid grid;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<std::string> column_names;

    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Unstandardised feature series.
[[nodiscard]] TimeSeries raw_feature(const SensorDataset& dataset, FeatureId id);

[[nodiscard]] FeatureMatrix build_features(const SensorDataset& dataset, const FeatureSet& set);

struct EnumerationPolicy {
    int max_size = 2;  // all non-empty subsets up to this many features
};

/// Subsets ordered by size, then lexicographically by vocabulary position.
[[nodiscard]] std::vector<FeatureSet> enumerate_feature_sets(std::span<const FeatureId> vocabulary,
                                                             const EnumerationPolicy& policy);

}  // namespace winop
