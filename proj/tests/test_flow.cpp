#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "msihar/errors.hpp"
#include "msihar/flow.hpp"
#include "msihar/flow_io.hpp"
#include "msihar/rng.hpp"

using namespace msihar;

namespace {

GrayFrame gaussian_blob(int h, int w, double cy, double cx, double sigma) {
    std::vector<double> px(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
            px[static_cast<std::size_t>(r) * w + c] = std::exp(-d2 / (2 * sigma * sigma));
        }
    return GrayFrame(h, w, std::move(px));
}

// Mean displacement over pixels where the blob has real support, so the
// flat background does not drown the signal.
std::pair<double, double> weighted_mean_flow(const FlowField& flow,
                                             const GrayFrame& weight) {
    double su = 0, sv = 0, sw = 0;
    for (int r = 0; r < flow.height(); ++r)
        for (int c = 0; c < flow.width(); ++c) {
            double w = weight.at(r, c);
            if (w < 0.05) continue;
            su += w * flow.u_at(r, c);
            sv += w * flow.v_at(r, c);
            sw += w;
        }
    return {su / sw, sv / sw};
}

}  // namespace

TEST_CASE("horn_schunck recovers a subpixel vertical shift") {
    auto a = gaussian_blob(40, 40, 19.0, 20.0, 4.0);
    auto b = gaussian_blob(40, 40, 19.6, 20.0, 4.0);
    HornSchunckParams p;
    p.alpha = 0.1;  // weak smoothing so the blob's motion dominates
    p.iterations = 800;
    p.convergence_eps = 0.0;
    auto flow = horn_schunck(a, b, p);
    auto [mu, mv] = weighted_mean_flow(flow, a);
    CHECK(std::abs(mu - 0.6) < 0.05);
    CHECK(std::abs(mv) < 0.02);
    CHECK_FALSE(flow.normalized());
}

TEST_CASE("horn_schunck recovers a horizontal shift") {
    auto a = gaussian_blob(40, 48, 20.0, 22.0, 4.0);
    auto b = gaussian_blob(40, 48, 20.0, 23.0, 4.0);
    HornSchunckParams p;
    p.alpha = 0.1;
    p.iterations = 800;
    p.convergence_eps = 0.0;
    auto flow = horn_schunck(a, b, p);
    auto [mu, mv] = weighted_mean_flow(flow, a);
    CHECK(std::abs(mv - 1.0) < 0.05);
    CHECK(std::abs(mu) < 0.02);
}

TEST_CASE("jacobi sweeps never increase the objective") {
    auto a = gaussian_blob(24, 24, 11.0, 11.0, 3.0);
    auto b = gaussian_blob(24, 24, 12.0, 12.4, 3.0);
    HornSchunckParams p;
    p.iterations = 60;
    p.convergence_eps = 0.0;
    std::vector<double> energies;
    horn_schunck(a, b, p, [&](const std::vector<double>& u, const std::vector<double>& v) {
        energies.push_back(horn_schunck_energy(a, b, u, v, p.alpha));
    });
    REQUIRE(energies.size() == 60);
    for (std::size_t i = 1; i < energies.size(); ++i)
        CHECK(energies[i] <= energies[i - 1] + 1e-12);
}

TEST_CASE("swapping the frames roughly negates the flow") {
    auto a = gaussian_blob(32, 32, 15.0, 14.0, 3.5);
    auto b = gaussian_blob(32, 32, 15.8, 14.0, 3.5);
    HornSchunckParams p;
    p.iterations = 200;
    p.convergence_eps = 0.0;
    auto fwd = horn_schunck(a, b, p);
    auto bwd = horn_schunck(b, a, p);
    auto [fu, fv] = weighted_mean_flow(fwd, a);
    auto [bu, bv] = weighted_mean_flow(bwd, b);
    CHECK(std::abs(fu + bu) < 0.1);
    CHECK(std::abs(fv + bv) < 0.1);
}

TEST_CASE("identical frames give zero flow") {
    auto a = gaussian_blob(20, 20, 10.0, 10.0, 3.0);
    auto flow = horn_schunck(a, a, HornSchunckParams{});
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 20; ++c) {
            CHECK(flow.u_at(r, c) == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(flow.v_at(r, c) == doctest::Approx(0.0).epsilon(1e-9));
        }
}

TEST_CASE("horn_schunck input validation") {
    auto a = gaussian_blob(10, 10, 5, 5, 2);
    auto b = gaussian_blob(10, 12, 5, 5, 2);
    CHECK_THROWS_AS(horn_schunck(a, b, HornSchunckParams{}), DimensionMismatch);
    std::vector<double> tiny(2, 0.0);
    GrayFrame small(1, 2, tiny);
    CHECK_THROWS_AS(horn_schunck(small, small, HornSchunckParams{}), FrameTooSmall);
}

TEST_CASE("normalize_flow scales components by frame extent") {
    FlowField raw(4, 8, std::vector<float>(32, 2.0f), std::vector<float>(32, 1.0f), false);
    auto norm = normalize_flow(raw);
    CHECK(norm.normalized());
    CHECK(norm.u_at(2, 3) == doctest::Approx(0.5));    // 2 / height 4
    CHECK(norm.v_at(2, 3) == doctest::Approx(0.125));  // 1 / width 8
    CHECK_THROWS_AS(normalize_flow(norm), AlreadyNormalized);
}

TEST_CASE("flow file round trip preserves every value") {
    SplitMix64 rng(99);
    std::vector<FlowField> fields;
    for (int f = 0; f < 3; ++f) {
        std::vector<float> u(6 * 5), v(6 * 5);
        for (auto& x : u) x = static_cast<float>(rng.next_gaussian());
        for (auto& x : v) x = static_cast<float>(rng.next_gaussian());
        fields.emplace_back(6, 5, u, v, false);
    }
    FlowSequence seq(fields, 12.5, "clip");
    auto path = std::filesystem::temp_directory_path() / "msihar_flow_rt.flow";
    write_flow_sequence(seq, path);
    auto back = load_flow_sequence(path);
    REQUIRE(back.frames().size() == 3);
    CHECK(back.fps() == doctest::Approx(12.5));
    CHECK_FALSE(back.normalized());
    for (int f = 0; f < 3; ++f)
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 5; ++c) {
                CHECK(back.frames()[f].u_at(r, c) == seq.frames()[f].u_at(r, c));
                CHECK(back.frames()[f].v_at(r, c) == seq.frames()[f].v_at(r, c));
            }
    std::filesystem::remove(path);
}

TEST_CASE("flow loader rejects corrupt headers") {
    auto path = std::filesystem::temp_directory_path() / "msihar_flow_bad.flow";
    {
        std::ofstream out(path, std::ios::binary);
        out << "MSIF9\n";
    }
    CHECK_THROWS_AS(load_flow_sequence(path), MalformedHeader);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_flow_sequence(path), DataLoadFailed);
}

TEST_CASE("normalized flow files reject out-of-range components") {
    std::vector<float> u(4, 0.5f), v(4, 0.5f);
    u[2] = 1.5f;
    std::ostringstream text;
    text << "2 2 1 10 1\n";
    for (float x : u) text << x << " ";
    text << "\n";
    for (float x : v) text << x << " ";
    text << "\n";
    std::istringstream in(text.str());
    CHECK_THROWS_AS(read_flow_text(in, "bad"), FlowOutOfRange);
}

TEST_CASE("pgm loader scales intensities into the unit interval") {
    auto path = std::filesystem::temp_directory_path() / "msihar_test.pgm";
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n# comment line\n3 2\n255\n";
        unsigned char px[6] = {0, 51, 102, 153, 204, 255};
        out.write(reinterpret_cast<const char*>(px), 6);
    }
    auto frame = load_gray_pgm(path);
    REQUIRE(frame.height() == 2);
    REQUIRE(frame.width() == 3);
    CHECK(frame.at(0, 0) == doctest::Approx(0.0));
    CHECK(frame.at(0, 1) == doctest::Approx(51.0 / 255.0));
    CHECK(frame.at(1, 2) == doctest::Approx(1.0));
    std::filesystem::remove(path);
}
