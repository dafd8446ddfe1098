#include "winop/features.hpp"

#include "winop/error.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace winop {

namespace {

constexpr std::array kVocabulary{
    FeatureId::t_amb,    FeatureId::t_meas,   FeatureId::dt_meas,
    FeatureId::dt_amb,   FeatureId::t_amb_minus_t_meas,   FeatureId::t_meas_minus_dt_meas,
    FeatureId::rh_amb,   FeatureId::rh_meas,  FeatureId::drh_meas,
    FeatureId::drh_amb,  FeatureId::rh_amb_minus_rh_meas, FeatureId::rh_meas_minus_drh_meas,
};

constexpr std::array<const char*, kVocabulary.size()> kNames{
    "T_amb",  "T_meas",  "dT_meas",  "dT_amb",  "T_amb-T_meas",   "T_meas-dT_meas",
    "RH_amb", "RH_meas", "dRH_meas", "dRH_amb", "RH_amb-RH_meas", "RH_meas-dRH_meas",
};

const TimeSeries& humidity(const std::optional<TimeSeries>& series, FeatureId id) {
    if (!series) {
        throw InvalidArgument("feature " + to_string(id) +
                              " needs relative humidity, which this dataset lacks");
    }
    return *series;
}

void combinations(std::span<const FeatureId> vocab, std::size_t size, std::size_t from,
                  std::vector<FeatureId>& current, std::vector<FeatureSet>& out) {
    if (current.size() == size) {
        out.push_back(FeatureSet::of(current));
        return;
    }
    for (std::size_t i = from; i < vocab.size(); ++i) {
        current.push_back(vocab[i]);
        combinations(vocab, size, i + 1, current, out);
        current.pop_back();
    }
}

}  // namespace

std::span<const FeatureId> base_vocabulary() { return kVocabulary; }

std::string to_string(FeatureId id) { return kNames[static_cast<std::size_t>(id)]; }

FeatureId parse_feature(const std::string& name) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (name == kNames[i]) {
            return kVocabulary[i];
        }
    }
    throw InvalidArgument("unknown feature identifier '" + name + "'");
}

bool uses_humidity(FeatureId id) { return static_cast<int>(id) >= static_cast<int>(FeatureId::rh_amb); }

FeatureSet FeatureSet::of(std::vector<FeatureId> features) {
    FeatureSet set;
    for (std::size_t i = 0; i < features.size(); ++i) {
        set.name += (i == 0 ? "" : "+") + to_string(features[i]);
    }
    set.features = std::move(features);
    set.validate();
    return set;
}

FeatureSet FeatureSet::parse(const std::string& spec) {
    std::vector<FeatureId> ids;
    std::size_t begin = 0;
    while (begin <= spec.size()) {
        const std::size_t end = spec.find_first_of("+,", begin);
        const std::string token =
            spec.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
        ids.push_back(parse_feature(token));
        if (end == std::string::npos) {
            break;
        }
        begin = end + 1;
    }
    return of(std::move(ids));
}

void FeatureSet::validate() const {
    if (features.empty()) {
        throw InvalidArgument("feature set must not be empty");
    }
    std::set<FeatureId> seen;
    for (FeatureId id : features) {
        if (static_cast<std::size_t>(id) >= kVocabulary.size()) {
            throw InvalidArgument("feature identifier out of range");
        }
        if (!seen.insert(id).second) {
            throw InvalidArgument("duplicate feature " + to_string(id) + " in set");
        }
    }
}

TimeSeries raw_feature(const SensorDataset& dataset, FeatureId id) {
    const TimeSeries& t_meas = dataset.indoor_temperature;
    const TimeSeries& t_amb = dataset.ambient_temperature;
    switch (id) {
        case FeatureId::t_amb: return t_amb;
        case FeatureId::t_meas: return t_meas;
        case FeatureId::dt_meas: return derivative(t_meas);
        case FeatureId::dt_amb: return derivative(t_amb);
        case FeatureId::t_amb_minus_t_meas: return subtract(t_amb, t_meas);
        case FeatureId::t_meas_minus_dt_meas: return subtract(t_meas, derivative(t_meas));
        default: break;
    }
    const TimeSeries& rh_meas = humidity(dataset.indoor_humidity, id);
    const TimeSeries& rh_amb = humidity(dataset.ambient_humidity, id);
    switch (id) {
        case FeatureId::rh_amb: return rh_amb;
        case FeatureId::rh_meas: return rh_meas;
        case FeatureId::drh_meas: return derivative(rh_meas);
        case FeatureId::drh_amb: return derivative(rh_amb);
        case FeatureId::rh_amb_minus_rh_meas: return subtract(rh_amb, rh_meas);
        case FeatureId::rh_meas_minus_drh_meas: return subtract(rh_meas, derivative(rh_meas));
        default: break;
    }
    throw InvalidArgument("unhandled feature identifier");
}

FeatureMatrix build_features(const SensorDataset& dataset, const FeatureSet& set) {
    set.validate();
    dataset.validate();
    FeatureMatrix m;
    m.grid = dataset.grid();
    m.rows = m.grid.size;
    m.cols = set.features.size();
    m.data.resize(m.rows * m.cols);
    for (std::size_t c = 0; c < m.cols; ++c) {
        const FeatureId id = set.features[c];
        TimeSeries column = [&] {
            try {
                return normalize(raw_feature(dataset, id));
            } catch (const DegenerateInput& e) {
                throw DegenerateInput("feature " + to_string(id) + ": " + e.what());
            }
        }();
        for (std::size_t r = 0; r < m.rows; ++r) {
            m.data[r * m.cols + c] = column[r];
        }
        m.column_names.push_back(to_string(id));
    }
    return m;
}

std::vector<FeatureSet> enumerate_feature_sets(std::span<const FeatureId> vocabulary,
                                               const EnumerationPolicy& policy) {
    if (vocabulary.empty()) {
        throw InvalidArgument("feature vocabulary must not be empty");
    }
    const auto limit = static_cast<std::size_t>(std::clamp<long>(policy.max_size, 0,
                                                                 static_cast<long>(vocabulary.size())));
    std::vector<FeatureSet> out;
    std::vector<FeatureId> current;
    for (std::size_t size = 1; size <= limit; ++size) {
        combinations(vocabulary, size, 0, current, out);
    }
    return out;
}

}  // namespace winop
