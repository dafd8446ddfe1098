#include "doctest.h"
#include "support/oracles.hpp"

#include "winop/error.hpp"
#include "winop/timeseries.hpp"

#include <chrono>
#include <cmath>

using namespace winop;
using std::chrono::seconds;

namespace {

const TimePoint t0 = std::chrono::sys_days(std::chrono::year{2023} / 7 / 20);

TimeSeries hourly(std::vector<double> v) { return TimeSeries(t0, 3600, std::move(v)); }

std::vector<double> vec(const TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST_CASE("series construction rejects invalid input") {
    CHECK_THROWS_AS(TimeSeries(t0, 0, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(TimeSeries(t0, 60, {}), InvalidArgument);
    CHECK_THROWS_AS(TimeSeries(t0, 60, {1.0, NAN}), InvalidArgument);
    CHECK_THROWS_AS(TimeSeries(t0, 60, {1.0, INFINITY}), InvalidArgument);
    CHECK_THROWS_AS(BinarySeries(t0, 60, {0, 2}), InvalidArgument);
    const BinarySeries b(t0, 60, {0, 1, 1, 0});
    CHECK(b.open_fraction() == doctest::Approx(0.5));
    CHECK(b.complement().states()[0] == 1);
}

TEST_CASE("ewm follows the recursion") {
    // step = half-life gives alpha = 0.5
    const TimeSeries s = ewm_smooth(hourly({0, 1, 1}), Seconds(3600));
    CHECK(vec(s) == std::vector<double>{0, 0.5, 0.75});
    CHECK(ewm_alpha(3600, Seconds(3600)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ewm_smooth(hourly({1, 2}), Seconds(0)), InvalidArgument);
    CHECK_THROWS_AS(ewm_smooth(hourly({1, 2}), Seconds(-5)), InvalidArgument);
}

TEST_CASE("ewm of a constant is the constant") {
    const TimeSeries s = ewm_smooth(hourly(std::vector<double>(50, 21.5)), Seconds(7200));
    for (double v : s.values()) CHECK(v == 21.5);
}

TEST_CASE("ewm unit step response matches the weighted sum") {
    std::vector<double> x(200, 0.0);
    for (std::size_t i = 100; i < x.size(); ++i) x[i] = 1.0;
    const TimeSeries s = ewm_smooth(hourly(x), Seconds(10 * 3600));
    const double alpha = 1.0 - std::pow(2.0, -0.1);
    CHECK(s[100] == doctest::Approx(alpha).epsilon(1e-12));
    CHECK(s[100] == doctest::Approx(0.0670).epsilon(1e-3));
    const auto direct = oracle::ewm_direct(x, alpha);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(s[i] - direct[i]) < 1e-12);
}

TEST_CASE("ewm recursion equals direct sum on random series") {
    oracle::Gen gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = gen.normals(gen.size(2, 400), gen.uniform(-10, 10), gen.uniform(0.1, 5));
        const auto step = static_cast<std::int64_t>(gen.size(60, 3600));
        const Seconds hl(gen.uniform(60, 48 * 3600));
        const TimeSeries s = ewm_smooth(TimeSeries(t0, step, x), hl);
        const auto direct = oracle::ewm_direct(x, ewm_alpha(step, hl));
        for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(std::abs(s[i] - direct[i]) < 1e-9);
    }
}

TEST_CASE("ewm is shift equivariant") {
    oracle::Gen gen(12);
    const auto x = gen.normals(300);
    auto shifted = x;
    for (auto& v : shifted) v += 7.25;
    const TimeSeries a = ewm_smooth(hourly(x), Seconds(5 * 3600));
    const TimeSeries b = ewm_smooth(hourly(shifted), Seconds(5 * 3600));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(b[i] == doctest::Approx(a[i] + 7.25).epsilon(1e-12));
}

TEST_CASE("derivative uses central differences and one-sided ends") {
    CHECK(vec(derivative(hourly({0, 1, 3}))) == std::vector<double>{1, 1.5, 2});
    const TimeSeries half_hour(t0, 1800, {0, 1, 3});
    CHECK(vec(derivative(half_hour)) == std::vector<double>{2, 3, 4});
    const TimeSeries flat = derivative(hourly(std::vector<double>(10, 4.0)));
    for (double v : flat.values()) CHECK(v == 0.0);
    std::vector<double> sq(10);
    for (std::size_t t = 0; t < 10; ++t) sq[t] = static_cast<double>(t * t);
    const TimeSeries d = derivative(hourly(sq));
    for (std::size_t t = 1; t + 1 < 10; ++t) CHECK(d[t] == 2.0 * static_cast<double>(t));
    CHECK_THROWS_AS(derivative(hourly({1, 2})), InvalidArgument);
}

TEST_CASE("derivative is linear") {
    oracle::Gen gen(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = gen.normals(gen.size(3, 100));
        const double a = gen.uniform(-4, 4);
        const double b = gen.uniform(-50, 50);
        auto y = x;
        for (auto& v : y) v = a * v + b;
        const TimeSeries dx = derivative(hourly(x));
        const TimeSeries dy = derivative(hourly(y));
        for (std::size_t i = 0; i < x.size(); ++i) {
            REQUIRE(dy[i] == doctest::Approx(a * dx[i]).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("normalize gives zero mean and unit deviation") {
    CHECK(vec(normalize(hourly({0, 2}))) == std::vector<double>{-1, 1});
    oracle::Gen gen(14);
    const auto x = gen.normals(1000, 20.0, 3.0);
    const auto z = vec(normalize(hourly(x)));
    const auto st = oracle::two_pass(z);
    CHECK(std::abs(st.mean) < 1e-9);
    CHECK(std::abs(st.stddev - 1.0) < 1e-9);
    const auto zz = vec(normalize(hourly(z)));
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(zz[i] - z[i]) < 1e-9);
    CHECK_THROWS_AS(normalize(hourly({3, 3, 3})), DegenerateInput);
}

TEST_CASE("minmax normalization maps onto the unit interval") {
    const auto m = vec(normalize(hourly({2, 4, 6}), Normalization::minmax));
    CHECK(m == std::vector<double>{0, 0.5, 1});
    CHECK(parse_normalization("minmax") == Normalization::minmax);
    CHECK_THROWS_AS(parse_normalization("robust"), InvalidArgument);
}

TEST_CASE("subtract requires alignment") {
    CHECK(vec(subtract(hourly({3, 4}), hourly({1, 1}))) == std::vector<double>{2, 3});
    const TimeSeries a = hourly({1, 2, 3});
    const TimeSeries zero = subtract(a, a);
    for (double v : zero.values()) CHECK(v == 0.0);
    const TimeSeries c = hourly(std::vector<double>(20, 5.0));
    const TimeSeries detrended = subtract(c, ewm_smooth(c, Seconds(3600)));
    for (double v : detrended.values()) CHECK(v == 0.0);

    try {
        (void)subtract(a, TimeSeries(t0, 1800, {1, 2, 3}));
        FAIL("expected an alignment error");
    } catch (const AlignmentError& e) {
        CHECK(e.field() == "step");
    }
    try {
        (void)subtract(a, TimeSeries(t0 + seconds(60), 3600, {1, 2, 3}));
        FAIL("expected an alignment error");
    } catch (const AlignmentError& e) {
        CHECK(e.field() == "start");
    }
    try {
        (void)subtract(a, hourly({1, 2}));
        FAIL("expected an alignment error");
    } catch (const AlignmentError& e) {
        CHECK(e.field() == "length");
    }
}

TEST_CASE("detrending shrinks a trend") {
    oracle::Gen gen(15);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x(500);
        const double slope = gen.uniform(0.05, 0.5) * (gen.coin() ? 1 : -1);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = slope * static_cast<double>(t) + gen.normal(0, 0.3);
        const TimeSeries s = hourly(x);
        const auto resid = vec(subtract(s, ewm_smooth(s, Seconds(12 * 3600))));
        double resid_mag = 0.0;
        for (double v : resid) resid_mag += std::abs(v);
        resid_mag /= static_cast<double>(resid.size());
        const auto st = oracle::two_pass(x);
        double dev = 0.0;
        for (double v : x) dev += std::abs(v - st.mean);
        dev /= static_cast<double>(x.size());
        CHECK(resid_mag < dev);
    }
}

TEST_CASE("resample interpolates linearly") {
    const std::vector<Observation> obs{{t0, 0.0}, {t0 + seconds(600), 10.0}};
    CHECK(vec(resample(obs, 300)) == std::vector<double>{0, 5, 10});

    std::vector<Observation> uniform;
    for (int i = 0; i < 12; ++i) uniform.push_back({t0 + seconds(300 * i), 0.5 * i * i});
    const TimeSeries same = resample(uniform, 300);
    REQUIRE(same.size() == uniform.size());
    for (std::size_t i = 0; i < uniform.size(); ++i) CHECK(same[i] == uniform[i].value);
}

TEST_CASE("resample matches the piecewise-linear oracle") {
    oracle::Gen gen(16);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Observation> obs;
        std::vector<double> times, values;
        double t = 0.0;
        for (int i = 0; i < 50; ++i) {
            t += static_cast<double>(gen.size(60, 600));
            const double v = gen.normal(20, 4);
            obs.push_back({t0 + seconds(static_cast<long>(t)), v});
            times.push_back(t);
            values.push_back(v);
        }
        const TimeSeries r = resample(obs, 300);
        CHECK(r.start() == obs.front().time);
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double at = times.front() + 300.0 * static_cast<double>(i);
            REQUIRE(std::abs(r[i] - oracle::piecewise_linear(times, values, at)) < 1e-9);
        }
        CHECK(times.front() + 300.0 * static_cast<double>(r.size() - 1) <= times.back());
    }
}

TEST_CASE("resample rejects bad input and long gaps") {
    const std::vector<Observation> unsorted{{t0 + seconds(600), 1.0}, {t0, 0.0}};
    CHECK_THROWS_AS(resample(unsorted, 300), InvalidArgument);
    const std::vector<Observation> one{{t0, 1.0}};
    CHECK_THROWS_AS(resample(one, 300), InvalidArgument);

    std::vector<Observation> gappy;
    for (int i = 0; i < 10; ++i) gappy.push_back({t0 + seconds(300 * i), 1.0 * i});
    gappy.push_back({t0 + seconds(300 * 9 + 300 * 10), 19.0});  // 9 missing samples
    CHECK_THROWS_AS(resample(gappy, 300), GapError);
    ResampleOptions lenient;
    lenient.gap_policy = GapPolicy::linear_interpolate;
    const TimeSeries bridged = resample(gappy, 300, lenient);
    CHECK(bridged.size() == 20);
    CHECK(bridged[14] == doctest::Approx(14.0));

    // Four missing samples are still bridged under the default policy.
    std::vector<Observation> short_gap;
    for (int i = 0; i < 5; ++i) short_gap.push_back({t0 + seconds(300 * i), 0.0});
    short_gap.push_back({t0 + seconds(300 * 9), 5.0});
    CHECK_NOTHROW((void)resample(short_gap, 300));
}

TEST_CASE("coarse sources are not mistaken for gaps") {
    std::vector<Observation> hourly_obs;
    for (int h = 0; h < 6; ++h) hourly_obs.push_back({t0 + seconds(3600 * h), 10.0 + h});
    const TimeSeries r = resample(hourly_obs, 300);
    CHECK(r.size() == 61);
    CHECK(r[6] == doctest::Approx(10.5));
}

TEST_CASE("resample onto a grid outside the data fails") {
    const std::vector<Observation> obs{{t0, 0.0}, {t0 + seconds(600), 10.0}};
    CHECK_THROWS_AS(resample_onto(obs, Grid{t0 - seconds(300), 300, 3}, {}), InvalidArgument);
    CHECK_THROWS_AS(resample_onto(obs, Grid{t0, 300, 4}, {}), InvalidArgument);
}
