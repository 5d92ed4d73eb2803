#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "msihar/errors.hpp"
#include "msihar/resample.hpp"

using namespace msihar;

namespace {

ImuSeries make_series(std::vector<double> t, std::vector<double> ax,
                      std::vector<int> labels, double rate) {
    std::vector<std::array<double, 3>> samples;
    for (std::size_t i = 0; i < t.size(); ++i)
        samples.push_back({ax[i], -ax[i], 0.5 * ax[i]});
    return ImuSeries(std::move(t), std::move(samples), std::move(labels), rate,
                     Provenance::Real, "s1");
}

}  // namespace

TEST_CASE("uniform input at the target rate passes through") {
    auto s = make_series({0.0, 0.1, 0.2, 0.3}, {1.0, 2.0, 3.0, 4.0}, {0, 0, 1, 1}, 10.0);
    auto out = resample_linear(s, 10.0);
    REQUIRE(out.size() == 4);
    CHECK(out.rate_hz() == doctest::Approx(10.0));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(out.timestamps()[i] == doctest::Approx(s.timestamps()[i]));
        CHECK(out.samples()[i][0] == doctest::Approx(s.samples()[i][0]).epsilon(1e-12));
        CHECK(out.labels()[i] == s.labels()[i]);
    }
    CHECK(out.provenance() == Provenance::Real);
    CHECK(out.subject_id() == "s1");
}

TEST_CASE("midpoints interpolate linearly") {
    auto s = make_series({0.0, 1.0, 2.0}, {0.0, 10.0, 30.0}, {0, 0, 0}, 1.0);
    auto out = resample_linear(s, 2.0);
    // span 2 s at 2 Hz: grid 0, 0.5, 1.0, 1.5, 2.0
    REQUIRE(out.size() == 5);
    CHECK(out.samples()[1][0] == doctest::Approx(5.0));
    CHECK(out.samples()[3][0] == doctest::Approx(20.0));
    CHECK(out.samples()[4][0] == doctest::Approx(30.0));
    CHECK(out.samples()[1][1] == doctest::Approx(-5.0));
    CHECK(out.samples()[1][2] == doctest::Approx(2.5));
}

TEST_CASE("labels follow the nearest input sample, ties to the earlier one") {
    auto s = make_series({0.0, 1.0}, {0.0, 1.0}, {3, 7}, 1.0);
    auto out = resample_linear(s, 2.0);
    // grid 0, 0.5, 1.0; the 0.5 point is equidistant
    REQUIRE(out.size() == 3);
    CHECK(out.labels()[0] == 3);
    CHECK(out.labels()[1] == 3);
    CHECK(out.labels()[2] == 7);

    auto s2 = make_series({0.0, 0.8, 2.0}, {0.0, 1.0, 2.0}, {3, 7, 9}, 1.0);
    auto out2 = resample_linear(s2, 1.0);
    // grid 0, 1, 2; t=1 is nearer to 0.8 than to 2.0
    CHECK(out2.labels()[1] == 7);
}

TEST_CASE("downsampling an irregular stream keeps the value envelope") {
    std::vector<double> t, ax;
    std::vector<int> labels;
    double tt = 0.0;
    for (int i = 0; i < 100; ++i) {
        t.push_back(tt);
        ax.push_back(std::sin(2 * M_PI * 0.5 * tt));
        labels.push_back(i < 50 ? 0 : 1);
        tt += (i % 3 == 0) ? 0.03 : 0.05;
    }
    auto out = resample_linear(make_series(t, ax, labels, 23.0), 25.0);
    std::size_t expected = static_cast<std::size_t>(
                               std::floor((t.back() - t.front()) * 25.0 + 1e-9)) +
                           1;
    CHECK(out.size() == expected);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = std::sin(2 * M_PI * 0.5 * out.timestamps()[i]);
        CHECK(std::abs(out.samples()[i][0] - v) < 0.01);
    }
}

TEST_CASE("resample input validation") {
    auto one = make_series({0.0}, {1.0}, {0}, 10.0);
    CHECK_THROWS_AS(resample_linear(one, 10.0), TooFewSamples);
    auto two = make_series({0.0, 0.1}, {1.0, 2.0}, {0, 0}, 10.0);
    CHECK_THROWS_AS(resample_linear(two, 0.0), ConfigInvalid);
    CHECK_THROWS_AS(resample_linear(two, -5.0), ConfigInvalid);
}
