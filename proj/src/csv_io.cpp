#include "winop/csv_io.hpp"

#include "winop/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace winop {

namespace {

constexpr double kMinPlausibleC = -40.0;
constexpr double kMaxPlausibleC = 60.0;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

struct CsvFile {
    std::string source;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // line number, fields
};

// Reads a file, checks the header and returns the non-blank data records.
CsvFile read_csv(const std::filesystem::path& path, std::string_view header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    CsvFile file;
    file.source = path.string();
    std::string line;
    std::size_t number = 0;
    bool have_header = false;
    const auto expected = split_csv_line(header);
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        for (auto& f : fields) f = std::string(trim(f));
        if (!have_header) {
            if (number == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
                fields.front().erase(0, 3);
            }
            if (fields != expected) {
                throw ParseError(file.source, number,
                                 "expected header '" + std::string(header) + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != expected.size()) {
            throw ParseError(file.source, number,
                             "expected " + std::to_string(expected.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        }
        file.rows.emplace_back(number, std::move(fields));
    }
    if (!have_header) {
        throw ParseError(file.source, number, "empty file, expected header '" +
                                                  std::string(header) + "'");
    }
    return file;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    return out;
}

std::int64_t median_spacing(const std::vector<LoggerRecord>& records) {
    std::vector<std::int64_t> gaps;
    for (std::size_t i = 1; i < records.size(); ++i) {
        gaps.push_back((records[i].time - records[i - 1].time).count());
    }
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    return gaps[gaps.size() / 2];
}

std::vector<Observation> temperature_obs(const std::vector<LoggerRecord>& records) {
    std::vector<Observation> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.time, r.temp_c});
    return out;
}

std::vector<Observation> humidity_obs(const std::vector<LoggerRecord>& records) {
    std::vector<Observation> out;
    for (const auto& r : records) {
        if (r.rh_pct) out.push_back({r.time, *r.rh_pct});
    }
    return out;
}

// Humidity is used only when it covers the grid; a column that is empty or
// too sparse is dropped rather than failing the temperature analysis.
std::optional<TimeSeries> humidity_on(const std::vector<LoggerRecord>& records, const Grid& grid,
                                      const ResampleOptions& options) {
    const auto obs = humidity_obs(records);
    if (obs.size() < 2 || obs.front().time > grid.start ||
        obs.back().time < grid.time_at(grid.size - 1)) {
        return std::nullopt;
    }
    return resample_onto(obs, grid, options);
}

}  // namespace

std::string format_timestamp(TimePoint t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd(day);
    const std::chrono::hh_mm_ss hms(t - day);
    std::array<char, 96> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(hms.hours().count()),
                  static_cast<long long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf.data();
}

TimePoint parse_timestamp(std::string_view text) {
    const std::string_view s = trim(text);
    auto fail = [&](const std::string& why) -> TimePoint {
        throw InvalidArgument("bad timestamp '" + std::string(s) + "': " + why);
    };
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':') {
        return fail("expected YYYY-MM-DDTHH:MM:SS");
    }
    const std::string_view zone = s.substr(19);
    if (!(zone.empty() || zone == "Z" || zone == "+00:00")) {
        return fail("only UTC timestamps are supported");
    }
    int year = 0;
    unsigned month = 0, day = 0;
    int hour = 0, minute = 0, second = 0;
    if (!parse_int(s.substr(0, 4), year) || !parse_int(s.substr(5, 2), month) ||
        !parse_int(s.substr(8, 2), day) || !parse_int(s.substr(11, 2), hour) ||
        !parse_int(s.substr(14, 2), minute) || !parse_int(s.substr(17, 2), second)) {
        return fail("non-numeric field");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
        return fail("field out of range");
    }
    return std::chrono::sys_days(ymd) + std::chrono::hours(hour) + std::chrono::minutes(minute) +
           std::chrono::seconds(second);
}

std::string format_number(double value) {
    if (value == 0.0) return "0";  // also folds -0
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw Error("number formatting failed");
    }
    return std::string(buf.data(), ptr);
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r' && c != '\n') {
            fields.back() += c;
        }
    }
    return fields;
}

std::vector<LoggerRecord> read_logger_csv(const std::filesystem::path& path) {
    const CsvFile file = read_csv(path, kLoggerHeader);
    std::vector<LoggerRecord> records;
    records.reserve(file.rows.size());
    for (const auto& [line, f] : file.rows) {
        LoggerRecord r;
        try {
            r.time = parse_timestamp(f[0]);
        } catch (const InvalidArgument& e) {
            throw ParseError(file.source, line, e.what());
        }
        if (!parse_double(f[1], r.temp_c)) {
            throw ParseError(file.source, line, "bad temperature '" + f[1] + "'");
        }
        if (r.temp_c < kMinPlausibleC || r.temp_c > kMaxPlausibleC) {
            throw ParseError(file.source, line,
                             "temperature " + f[1] +
                                 " outside -40..60 degC; is the file in Fahrenheit or Kelvin?");
        }
        if (!f[2].empty()) {
            double rh = 0.0;
            if (!parse_double(f[2], rh)) {
                throw ParseError(file.source, line, "bad relative humidity '" + f[2] + "'");
            }
            if (rh < 0.0 || rh > 100.0) {
                throw ParseError(file.source, line, "relative humidity " + f[2] +
                                                        " outside 0..100 %");
            }
            r.rh_pct = rh;
        }
        if (!records.empty() && r.time <= records.back().time) {
            throw ParseError(file.source, line, "timestamps must be strictly increasing");
        }
        records.push_back(r);
    }
    if (records.size() < 2) {
        throw ParseError(file.source, 1, "need at least two data rows");
    }
    return records;
}

void write_logger_csv(const std::filesystem::path& path, const TimeSeries& temperature,
                      const std::optional<TimeSeries>& humidity) {
    if (humidity) {
        require_aligned(temperature.grid(), humidity->grid());
    }
    std::ostringstream out;
    out << kLoggerHeader << "\r\n";
    const Grid grid = temperature.grid();
    for (std::size_t i = 0; i < grid.size; ++i) {
        out << format_timestamp(grid.time_at(i)) << ',' << format_number(temperature[i]) << ',';
        if (humidity) out << format_number((*humidity)[i]);
        out << "\r\n";
    }
    write_text_file(path, out.str());
}

BinarySeries read_state_csv(const std::filesystem::path& path) {
    const CsvFile file = read_csv(path, kStateHeader);
    if (file.rows.size() < 2) {
        throw ParseError(file.source, 1, "need at least two data rows");
    }
    std::vector<std::uint8_t> states;
    TimePoint start{};
    TimePoint previous{};
    std::int64_t step = 0;
    for (const auto& [line, f] : file.rows) {
        TimePoint t;
        try {
            t = parse_timestamp(f[0]);
        } catch (const InvalidArgument& e) {
            throw ParseError(file.source, line, e.what());
        }
        if (f[1] != "0" && f[1] != "1") {
            throw ParseError(file.source, line, "window_open must be 0 or 1, got '" + f[1] + "'");
        }
        if (states.empty()) {
            start = t;
        } else {
            const std::int64_t gap = (t - previous).count();
            if (states.size() == 1) {
                step = gap;
            }
            if (gap <= 0 || gap != step) {
                throw ParseError(file.source, line, "state series must be uniformly spaced");
            }
        }
        previous = t;
        states.push_back(f[1] == "1" ? 1 : 0);
    }
    return BinarySeries(start, step, std::move(states));
}

void write_state_csv(const std::filesystem::path& path, const BinarySeries& state) {
    std::ostringstream out;
    out << kStateHeader << "\r\n";
    const Grid grid = state.grid();
    for (std::size_t i = 0; i < grid.size; ++i) {
        out << format_timestamp(grid.time_at(i)) << ',' << static_cast<int>(state[i]) << "\r\n";
    }
    write_text_file(path, out.str());
}

SensorDataset ingest(const std::filesystem::path& logger_csv,
                     const std::filesystem::path& weather_csv, const IngestOptions& options) {
    const auto logger = read_logger_csv(logger_csv);
    const auto weather = read_logger_csv(weather_csv);

    const std::int64_t step = options.step_seconds.value_or(median_spacing(logger));
    if (step <= 0) {
        throw InvalidArgument("step must be positive");
    }
    const TimePoint lo = std::max(logger.front().time, weather.front().time);
    const TimePoint hi = std::min(logger.back().time, weather.back().time);
    if (lo >= hi) {
        throw Error("logger (" + format_timestamp(logger.front().time) + " .. " +
                    format_timestamp(logger.back().time) + ") and weather (" +
                    format_timestamp(weather.front().time) + " .. " +
                    format_timestamp(weather.back().time) + ") do not overlap in time");
    }
    // Grid points stay on the logger's phase so re-ingesting our own output
    // reproduces the original samples.
    const std::int64_t offset = (lo - logger.front().time).count();
    const std::int64_t first = (offset + step - 1) / step * step;
    const TimePoint start = logger.front().time + std::chrono::seconds(first);
    if (start > hi) {
        throw Error("overlapping time range is shorter than one step");
    }
    const auto count = static_cast<std::size_t>((hi - start).count() / step) + 1;
    if (count < 2) {
        throw Error("overlapping time range holds fewer than two samples");
    }
    const Grid grid{start, step, count};

    SensorDataset ds{resample_onto(temperature_obs(logger), grid, options.resample),
                     resample_onto(temperature_obs(weather), grid, options.resample),
                     std::nullopt, std::nullopt, std::nullopt, {}};
    ds.indoor_humidity = humidity_on(logger, grid, options.resample);
    ds.ambient_humidity = humidity_on(weather, grid, options.resample);
    if (!ds.indoor_humidity || !ds.ambient_humidity) {
        ds.indoor_humidity.reset();
        ds.ambient_humidity.reset();
    }
    ds.provenance = {"logger: " + logger_csv.string(), "weather: " + weather_csv.string()};
    return ds;
}

void write_dataset(const std::filesystem::path& dir, const SensorDataset& dataset) {
    dataset.validate();
    std::filesystem::create_directories(dir);
    write_logger_csv(dir / "logger.csv", dataset.indoor_temperature, dataset.indoor_humidity);
    write_logger_csv(dir / "weather.csv", dataset.ambient_temperature, dataset.ambient_humidity);
    if (dataset.window_state) {
        write_state_csv(dir / "W.csv", *dataset.window_state);
    }
}

void write_intermediates_csv(const std::filesystem::path& path, const TimeSeries& temperature,
                             const DetectionResult& result, Normalization normalization) {
    const TimeSeries normalized = normalize(temperature, normalization);
    const Grid grid = temperature.grid();
    require_aligned(grid, result.smoothed.grid());
    std::ostringstream out;
    out << "t,T_norm,T_smooth,T_resid,d2,G\r\n";
    for (std::size_t i = 0; i < grid.size; ++i) {
        out << format_timestamp(grid.time_at(i)) << ',' << format_number(normalized[i]) << ','
            << format_number(result.smoothed[i]) << ',' << format_number(result.residual[i]) << ','
            << format_number(result.second_derivative[i]) << ','
            << static_cast<int>(result.guesses.entries[i]) << "\r\n";
    }
    write_text_file(path, out.str());
}

std::string metrics_csv_header() {
    return "macro_f1,true_opening_hours,false_opening_hours,hits,near_hits,guesses,actions,"
           "hits_near_hits_over_guesses,guesses_over_actions,tp,fp,tn,fn";
}

std::string metrics_csv_row(const MetricsReport& r) {
    std::ostringstream out;
    // An undefined ratio is left empty rather than written as inf.
    const std::string ga =
        r.guesses_over_actions_undefined ? std::string() : format_number(r.guesses_over_actions);
    out << format_number(r.macro_f1) << ',' << format_number(r.true_opening_hours) << ','
        << format_number(r.false_opening_hours) << ',' << r.hits << ',' << r.near_hits << ','
        << r.guesses << ',' << r.actions << ',' << format_number(r.hits_near_hits_over_guesses)
        << ',' << ga << ',' << r.confusion.tp << ',' << r.confusion.fp << ',' << r.confusion.tn
        << ',' << r.confusion.fn;
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_output(path);
    out << text;
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

}  // namespace winop
