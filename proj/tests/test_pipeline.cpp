#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "msihar/errors.hpp"
#include "msihar/pipeline.hpp"
#include "msihar/rng.hpp"

using namespace msihar;

namespace {

ImuSeries uniform_series(std::size_t n, double rate, std::vector<int> labels,
                         SplitMix64& rng, Provenance prov = Provenance::Real) {
    std::vector<double> t(n);
    std::vector<std::array<double, 3>> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(i) / rate;
        samples[i] = {rng.next_gaussian(), 2.0 * rng.next_gaussian() + 1.0,
                      0.5 * rng.next_gaussian() - 3.0};
    }
    return ImuSeries(std::move(t), std::move(samples), std::move(labels), rate, prov, "s");
}

// Quantile of the sorted window at level (k + 0.5) / points, the same
// plotting-position convention written out longhand.
double sort_quantile(std::vector<double> axis, double level) {
    std::sort(axis.begin(), axis.end());
    double pos = level * static_cast<double>(axis.size()) - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(axis.size() - 1));
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, axis.size() - 1);
    return axis[lo] + (pos - lo) * (axis[hi] - axis[lo]);
}

}  // namespace

TEST_CASE("window sample counts use round half up") {
    CHECK(window_samples(3.0, 25.0) == 75);
    CHECK(window_samples(1.5, 25.0) == 38);  // 37.5 rounds up
    CHECK(window_samples(6.0, 25.0) == 150);
    CHECK(window_samples(3.0, 25.0) / 2 == 37);
    CHECK(window_samples(2.0, 20.0) == 40);
    CHECK(window_samples(0.98, 25.0) == 25);  // 24.5 rounds up
}

TEST_CASE("segment slides by the step and labels by majority vote") {
    SplitMix64 rng(1);
    std::vector<int> labels(200, 0);
    for (std::size_t i = 100; i < 200; ++i) labels[i] = 4;
    auto s = uniform_series(200, 25.0, labels, rng);
    WindowSpec spec{3.0, 1.5, 25.0};
    auto windows = segment(s, spec);
    // L=75, S=38: starts 0, 38, 76, 114, (152 needs 227 samples -> stops)
    REQUIRE(windows.size() == 4);
    CHECK(windows[0].start == 0);
    CHECK(windows[1].start == 38);
    CHECK(windows[3].start == 114);
    for (const auto& w : windows) CHECK(w.length == 75);
    CHECK(windows[0].label == 0);
    // window at 76 covers samples 76..150: 24 zeros vs 51 fours
    CHECK(windows[2].label == 4);
    CHECK(windows[0].t_start == doctest::Approx(0.0));
    CHECK(windows[0].t_end == doctest::Approx(3.0));
    CHECK(windows[1].t_start == doctest::Approx(38 / 25.0));
}

TEST_CASE("majority ties pick the smaller class id") {
    SplitMix64 rng(2);
    std::vector<int> labels(50);
    for (std::size_t i = 0; i < 50; ++i) labels[i] = i < 25 ? 7 : 3;
    auto s = uniform_series(50, 25.0, labels, rng);
    WindowSpec spec{2.0, 2.0, 25.0};  // L=50, one window, 25 vs 25
    auto windows = segment(s, spec);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].label == 3);
}

TEST_CASE("segment validates spec and rate") {
    SplitMix64 rng(3);
    auto s = uniform_series(100, 25.0, std::vector<int>(100, 0), rng);
    CHECK_THROWS_AS(segment(s, WindowSpec{0.0, 1.0, 25.0}), ConfigInvalid);
    CHECK_THROWS_AS(segment(s, WindowSpec{3.0, 0.0, 25.0}), ConfigInvalid);
    CHECK_THROWS_AS(segment(s, WindowSpec{3.0, 1.5, 50.0}), ConfigInvalid);
    auto tiny = uniform_series(10, 25.0, std::vector<int>(10, 0), rng);
    CHECK_THROWS_AS(segment(tiny, WindowSpec{3.0, 1.5, 25.0}), SeriesTooShort);
}

TEST_CASE("ecdf features match the sort oracle") {
    SplitMix64 rng(44);
    std::vector<std::array<double, 3>> samples(75);
    for (auto& s : samples)
        s = {rng.next_gaussian(), rng.next_uniform(-5.0, 5.0), rng.next_gaussian() * 3.0};
    auto feats = ecdf_features(samples, 15);
    REQUIRE(feats.size() == 48);  // 3 * (15 + 1)
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> vals;
        for (const auto& s : samples) vals.push_back(s[axis]);
        for (int k = 0; k < 15; ++k) {
            double level = (k + 0.5) / 15.0;
            CHECK(feats[axis * 16 + k] ==
                  doctest::Approx(sort_quantile(vals, level)).epsilon(1e-12));
        }
        double mean = 0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        CHECK(feats[axis * 16 + 15] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("ecdf quantiles of a linear ramp are the ramp itself") {
    std::vector<std::array<double, 3>> samples(100);
    for (std::size_t i = 0; i < 100; ++i) {
        double v = static_cast<double>(i) / 99.0;
        samples[i] = {v, -v, 2.0 * v};
    }
    auto feats = ecdf_features(samples, 10);
    REQUIRE(feats.size() == 33);
    for (int k = 0; k < 10; ++k) {
        double level = (k + 0.5) / 10.0;
        CHECK(feats[k] == doctest::Approx(level).epsilon(0.01));
    }
    CHECK(feats[10] == doctest::Approx(0.5).epsilon(1e-9));  // axis mean
}

TEST_CASE("ecdf feature validation") {
    std::vector<std::array<double, 3>> empty;
    CHECK_THROWS_AS(ecdf_features(empty, 15), EmptyWindow);
    std::vector<std::array<double, 3>> one(5, {1.0, 2.0, 3.0});
    CHECK_THROWS_AS(ecdf_features(one, 1), ConfigInvalid);
}

TEST_CASE("stat features on a hand-computed window") {
    std::vector<std::array<double, 3>> samples;
    for (double v : {1.0, 2.0, 3.0, 4.0}) samples.push_back({v, v, v});
    auto f = stat_features(samples);
    REQUIRE(f.size() == 15);
    // per axis: mean, popvar, skew, kurtosis, rms
    CHECK(f[0] == doctest::Approx(2.5));
    CHECK(f[1] == doctest::Approx(1.25));
    CHECK(f[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f[3] == doctest::Approx(2.5625 / 1.5625).epsilon(1e-12));
    CHECK(f[4] == doctest::Approx(std::sqrt(7.5)).epsilon(1e-12));
    CHECK(f[5] == f[0]);
    CHECK(f[10] == f[0]);
}

TEST_CASE("zero-variance axes report zero shape moments") {
    std::vector<std::array<double, 3>> samples(10, {2.0, 2.0, 2.0});
    auto f = stat_features(samples);
    CHECK(f[0] == doctest::Approx(2.0));
    CHECK(f[1] == doctest::Approx(0.0));
    CHECK(f[2] == 0.0);
    CHECK(f[3] == 0.0);
    CHECK(f[4] == doctest::Approx(2.0));
}

TEST_CASE("calibration matches virtual moments to the reference within 1e-9") {
    SplitMix64 rng(7);
    auto real = uniform_series(500, 25.0, std::vector<int>(500, 0), rng);
    auto virt = uniform_series(400, 25.0, std::vector<int>(400, 1), rng,
                               Provenance::Virtual);
    auto ref = axis_stats(real);
    auto cal = calibrate_virtual(virt, ref);
    auto got = axis_stats(cal);
    for (int a = 0; a < 3; ++a) {
        CHECK(std::abs(got.mean[a] - ref.mean[a]) < 1e-9);
        CHECK(std::abs(got.stddev[a] - ref.stddev[a]) < 1e-9);
    }
    CHECK(cal.provenance() == Provenance::Virtual);
    CHECK(cal.labels() == virt.labels());
    CHECK(cal.timestamps() == virt.timestamps());

    // calibrating twice against the same reference is a fixed point
    auto twice = calibrate_virtual(cal, ref);
    for (std::size_t i = 0; i < twice.size(); ++i)
        for (int a = 0; a < 3; ++a)
            CHECK(twice.samples()[i][a] ==
                  doctest::Approx(cal.samples()[i][a]).epsilon(1e-9));
}

TEST_CASE("calibration rejects degenerate virtual axes") {
    std::vector<double> t{0.0, 0.04, 0.08};
    std::vector<std::array<double, 3>> flat(3, {1.0, 1.0, 1.0});
    ImuSeries virt(t, flat, {0, 0, 0}, 25.0, Provenance::Virtual, "v");
    AxisStats ref;
    ref.mean = {0.0, 0.0, 0.0};
    ref.stddev = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(calibrate_virtual(virt, ref), ZeroVarianceAxis);
    CHECK_THROWS_AS(pooled_axis_stats({}), EmptyReference);
}

TEST_CASE("extract_windows produces labeled feature vectors") {
    SplitMix64 rng(9);
    std::vector<int> labels(150, 2);
    auto s = uniform_series(150, 25.0, labels, rng);
    auto windows = extract_windows(s, WindowSpec{3.0, 1.5, 25.0}, FeatureSet::Ecdf, 15);
    REQUIRE(windows.size() == 2);
    CHECK(windows[0].features.size() == 48);
    CHECK(windows[0].label == 2);
    CHECK(windows[0].provenance == Provenance::Real);
    CHECK(windows[0].subject_id == "s");
    CHECK_FALSE(windows[0].msi.has_value());
    auto stats = extract_windows(s, WindowSpec{3.0, 1.5, 25.0}, FeatureSet::Stats, 15);
    CHECK(stats[0].features.size() == 15);
}

TEST_CASE("feature csv round trip with and without msi") {
    std::vector<FeatureWindow> rows(2);
    rows[0].features = {1.5, -2.25, 0.125};
    rows[0].label = 3;
    rows[0].provenance = Provenance::Virtual;
    rows[0].t_start = 0.0;
    rows[0].t_end = 3.0;
    rows[0].msi = 0.625;
    rows[0].subject_id = "p1";
    rows[0].source_id = "vidA";
    rows[1].features = {0.1, 0.2, 0.30000000000000004};
    rows[1].label = 0;
    rows[1].provenance = Provenance::Real;
    rows[1].t_start = 1.5;
    rows[1].t_end = 4.5;
    rows[1].subject_id = "p2";
    rows[1].source_id = "real1";
    std::ostringstream out;
    write_feature_csv(out, rows);
    std::istringstream in(out.str());
    auto back = read_feature_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].features == rows[0].features);
    CHECK(back[1].features == rows[1].features);
    CHECK(back[0].msi.has_value());
    CHECK(*back[0].msi == 0.625);
    CHECK_FALSE(back[1].msi.has_value());
    CHECK(back[0].provenance == Provenance::Virtual);
    CHECK(back[1].source_id == "real1");
}

TEST_CASE("feature set names round trip") {
    CHECK(feature_set_from_string("ecdf") == FeatureSet::Ecdf);
    CHECK(feature_set_from_string("stats") == FeatureSet::Stats);
    CHECK(to_string(FeatureSet::Ecdf) == "ecdf");
    CHECK(to_string(FeatureSet::Stats) == "stats");
    CHECK_THROWS_AS(feature_set_from_string("wavelet"), ConfigInvalid);
}
