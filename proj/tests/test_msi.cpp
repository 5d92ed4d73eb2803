#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "msihar/errors.hpp"
#include "msihar/msi.hpp"
#include "msihar/rng.hpp"
#include "msihar/types.hpp"

using namespace msihar;

namespace {

FlowField random_normalized_field(int h, int w, SplitMix64& rng) {
    std::vector<float> u(static_cast<std::size_t>(h) * w);
    std::vector<float> v(u.size());
    for (auto& x : u) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
    for (auto& x : v) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
    return FlowField(h, w, std::move(u), std::move(v), true);
}

// Straight-line reimplementation of the patch average used as the oracle.
double brute_force_msi(const FlowField& f, double x, double y, int patch) {
    int row = static_cast<int>(std::llround(y));
    int col = static_cast<int>(std::llround(x));
    int half = patch / 2;
    double sum = 0.0;
    int count = 0;
    for (int r = row - half; r <= row + half; ++r) {
        for (int c = col - half; c <= col + half; ++c) {
            if (r < 0 || r >= f.height() || c < 0 || c >= f.width()) continue;
            double uu = f.u_at(r, c);
            double vv = f.v_at(r, c);
            sum += std::sqrt(uu * uu + vv * vv);
            ++count;
        }
    }
    return sum / count;
}

FlowSequence constant_sequence(int frames, int h, int w, float u, float v) {
    std::vector<FlowField> fields;
    for (int i = 0; i < frames; ++i)
        fields.emplace_back(h, w, std::vector<float>(static_cast<std::size_t>(h) * w, u),
                            std::vector<float>(static_cast<std::size_t>(h) * w, v), true);
    return FlowSequence(std::move(fields), 10.0, "const");
}

PoseTrack center_track(int frames, int h, int w, double conf = 0.9, int joint = 10) {
    std::vector<PoseEntry> entries;
    for (int f = 0; f < frames; ++f)
        entries.push_back({f, joint, (w - 1) / 2.0, (h - 1) / 2.0, conf});
    return PoseTrack(std::move(entries), joint);
}

}  // namespace

TEST_CASE("patch size follows the two percent rule with odd rounding") {
    CHECK(patch_size(1080, 1920) == 39);  // 0.02 * 1920 = 38.4 -> 38 -> odd it up
    CHECK(patch_size(1920, 1080) == 39);
    CHECK(patch_size(480, 640) == 13);    // 12.8 -> 13 already odd
    CHECK(patch_size(250, 250) == 5);
    CHECK(patch_size(48, 48) == 3);       // below the floor
    CHECK(patch_size(10, 10) == 3);
    CHECK(patch_size(100, 150) == 3);     // 3.0 exactly
    CHECK(patch_size(100, 200) == 5);     // 4 -> odd it up
}

TEST_CASE("msi_frame on a constant field is the constant magnitude") {
    FlowField f(20, 20, std::vector<float>(400, 0.3f), std::vector<float>(400, 0.4f), true);
    CHECK(msi_frame(f, 10.0, 10.0, 5) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("msi_frame equals brute-force patch averaging everywhere") {
    SplitMix64 rng(4242);
    for (int trial = 0; trial < 300; ++trial) {
        int h = 4 + static_cast<int>(rng.next_below(12));
        int w = 4 + static_cast<int>(rng.next_below(12));
        auto f = random_normalized_field(h, w, rng);
        int patch = 3 + 2 * static_cast<int>(rng.next_below(3));
        double x = rng.next_uniform(0.0, w - 1.0);
        double y = rng.next_uniform(0.0, h - 1.0);
        CHECK(msi_frame(f, x, y, patch) == brute_force_msi(f, x, y, patch));
    }
}

TEST_CASE("msi_frame covers corner keypoints by clipping the patch") {
    SplitMix64 rng(17);
    auto f = random_normalized_field(8, 8, rng);
    CHECK(msi_frame(f, 0.0, 0.0, 5) == brute_force_msi(f, 0.0, 0.0, 5));
    CHECK(msi_frame(f, 7.0, 0.0, 5) == brute_force_msi(f, 7.0, 0.0, 5));
    CHECK(msi_frame(f, 0.0, 7.0, 5) == brute_force_msi(f, 0.0, 7.0, 5));
    CHECK(msi_frame(f, 7.0, 7.0, 5) == brute_force_msi(f, 7.0, 7.0, 5));
}

TEST_CASE("msi_frame rejects raw fields and out-of-frame keypoints") {
    FlowField raw(8, 8, std::vector<float>(64, 1.0f), std::vector<float>(64, 0.0f), false);
    CHECK_THROWS_AS(msi_frame(raw, 4, 4, 3), ConfigInvalid);
    SplitMix64 rng(3);
    auto f = random_normalized_field(8, 8, rng);
    CHECK_THROWS_AS(msi_frame(f, -1.0, 4.0, 3), KeypointOutsideFrame);
    CHECK_THROWS_AS(msi_frame(f, 4.0, 8.2, 3), KeypointOutsideFrame);
}

TEST_CASE("window msi closed forms") {
    CHECK(msi_window({0.2, 0.2, 0.2, 0.2}) == doctest::Approx(1.0).epsilon(1e-12));
    // population std of {0.49, 0.51} is exactly 0.01
    CHECK(msi_window({0.49, 0.51}) == doctest::Approx(0.36787944117144233).epsilon(1e-9));
    CHECK(msi_window({0.0, 0.02}, 50.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(msi_window({}), EmptySequence);
}

TEST_CASE("msi stays in the unit interval and is one only for constant motion") {
    SplitMix64 rng(88);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> per_frame;
        int n = 2 + static_cast<int>(rng.next_below(30));
        for (int i = 0; i < n; ++i) per_frame.push_back(rng.next_uniform(0.0, 1.0));
        double m = msi_window(per_frame);
        CHECK(m > 0.0);
        CHECK(m <= 1.0);
        double lo = *std::min_element(per_frame.begin(), per_frame.end());
        double hi = *std::max_element(per_frame.begin(), per_frame.end());
        if (hi - lo > 1e-6) CHECK(m < 1.0);
    }
}

TEST_CASE("segment msi selects frames by time and honors confidence") {
    auto seq = constant_sequence(20, 16, 16, 0.1f, 0.0f);  // 2 s at 10 fps
    auto track = center_track(20, 16, 16);
    MsiParams params;
    auto w = window_msi_for_segment(seq, track, 0.0, 1.0, params);
    CHECK(w.n_valid_frames == 10);  // frames 0..9
    CHECK(w.msi == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.t_start == doctest::Approx(0.0));
    CHECK(w.t_end == doctest::Approx(1.0));

    auto tail = window_msi_for_segment(seq, track, 1.0, 2.0, params);
    CHECK(tail.n_valid_frames == 10);  // frames 10..19

    CHECK_THROWS_AS(window_msi_for_segment(seq, track, 1.5, 2.5, params), SegmentOutOfRange);
    CHECK_THROWS_AS(window_msi_for_segment(seq, track, -0.5, 0.5, params), SegmentOutOfRange);
}

TEST_CASE("low-confidence and missing keypoints drop frames, then the window") {
    auto seq = constant_sequence(10, 16, 16, 0.1f, 0.0f);
    std::vector<PoseEntry> entries;
    for (int f = 0; f < 10; ++f) {
        double conf = f < 4 ? 0.9 : 0.1;  // frames 4.. fall below min_confidence
        entries.push_back({f, 10, 7.5, 7.5, conf});
    }
    PoseTrack track(entries, 10);
    MsiParams params;  // min_valid_fraction 0.5
    auto w = window_msi_for_segment(seq, track, 0.0, 0.8, params);
    CHECK(w.n_valid_frames == 4);  // frames 0..7 in range, 4 usable, ratio 0.5 passes
    CHECK_THROWS_AS(window_msi_for_segment(seq, track, 0.0, 1.0, params),
                    InsufficientValidFrames);

    PoseTrack empty(std::vector<PoseEntry>{}, 10);
    CHECK_THROWS_AS(window_msi_for_segment(seq, empty, 0.0, 1.0, params),
                    InsufficientValidFrames);
}

TEST_CASE("silverman bandwidth matches the hand-computed rule") {
    CHECK(silverman_bandwidth({1.0, 2.0, 3.0, 4.0, 5.0}) ==
          doctest::Approx(0.9224939070946869).epsilon(1e-12));
    CHECK(silverman_bandwidth({0.4, 0.6}) ==
          doctest::Approx(0.058469813952724776).epsilon(1e-12));
    // zero spread floors at 1e-3 so the KDE still has support
    CHECK(silverman_bandwidth({0.37, 0.37, 0.37, 0.37, 0.37, 0.37}) ==
          doctest::Approx(1e-3));
}

TEST_CASE("kde mode finds the dominant component of a mixture") {
    SplitMix64 rng(123);
    std::vector<double> values;
    for (int i = 0; i < 80; ++i)
        values.push_back(std::clamp(0.3 + 0.02 * rng.next_gaussian(), 1e-6, 1.0));
    for (int i = 0; i < 20; ++i)
        values.push_back(std::clamp(0.8 + 0.02 * rng.next_gaussian(), 1e-6, 1.0));
    double mode = class_msi_mode(values);
    CHECK(std::abs(mode - 0.3) < 0.03);
}

TEST_CASE("kde mode of a point mass sits on the nearest grid value") {
    double mode = class_msi_mode({0.371, 0.371, 0.371});
    CHECK(std::abs(mode - 0.371) <= 1.0 / 1000.0 + 1e-12);
    CHECK_THROWS_AS(class_msi_mode({}), EmptyInput);
}

TEST_CASE("kde mode ties resolve to the smaller grid value") {
    // two equal-weight points far enough apart for a bimodal density
    double mode = class_msi_mode({0.4, 0.6});
    CHECK(mode < 0.5);
    CHECK(std::abs(mode - 0.4) < 0.02);
}

TEST_CASE("window msi is invariant to integer upscaling of the flow") {
    // Sizes where the patch edge scales exactly with the frame (0.02 * max
    // stays an odd integer), so the upscaled patch covers precisely the
    // replicated blocks of the original patch.
    SplitMix64 rng(5150);
    const int dims[][2] = {{150, 150}, {150, 250}, {250, 250}};
    for (int trial = 0; trial < 6; ++trial) {
        int h = dims[trial % 3][0], w = dims[trial % 3][1];
        const int k = 3, frames = 8;
        std::vector<FlowField> base, scaled;
        for (int f = 0; f < frames; ++f) {
            std::vector<float> u(static_cast<std::size_t>(h) * w), v(u.size());
            for (auto& x : u) x = static_cast<float>(rng.next_uniform(-0.4, 0.4));
            for (auto& x : v) x = static_cast<float>(rng.next_uniform(-0.4, 0.4));
            std::vector<float> u2(static_cast<std::size_t>(h) * k * w * k),
                v2(static_cast<std::size_t>(h) * k * w * k);
            for (int r = 0; r < h * k; ++r)
                for (int c = 0; c < w * k; ++c) {
                    u2[static_cast<std::size_t>(r) * w * k + c] =
                        u[static_cast<std::size_t>(r / k) * w + c / k];
                    v2[static_cast<std::size_t>(r) * w * k + c] =
                        v[static_cast<std::size_t>(r / k) * w + c / k];
                }
            base.emplace_back(h, w, std::move(u), std::move(v), true);
            scaled.emplace_back(h * k, w * k, std::move(u2), std::move(v2), true);
        }
        FlowSequence small(std::move(base), 10.0, "small");
        FlowSequence big(std::move(scaled), 10.0, "big");
        int kx = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w)));
        int ky = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h)));
        std::vector<PoseEntry> se, be;
        for (int f = 0; f < frames; ++f) {
            se.push_back({f, 10, static_cast<double>(kx), static_cast<double>(ky), 0.9});
            be.push_back({f, 10, static_cast<double>(kx * k + (k - 1) / 2),
                          static_cast<double>(ky * k + (k - 1) / 2), 0.9});
        }
        MsiParams params;
        auto a = window_msi_for_segment(small, PoseTrack(se, 10), 0.0, 0.8, params);
        auto b = window_msi_for_segment(big, PoseTrack(be, 10), 0.0, 0.8, params);
        CHECK(std::abs(a.msi - b.msi) / a.msi < 0.02);
    }
}

TEST_CASE("msi csv round trip") {
    std::vector<MsiWindow> windows(2);
    windows[0].msi = 0.731;
    windows[0].t_start = 0.0;
    windows[0].t_end = 3.0;
    windows[0].class_id = 2;
    windows[0].source_id = "clip_a";
    windows[0].n_valid_frames = 30;
    windows[1].msi = 0.12345678901234567;
    windows[1].t_start = 1.5;
    windows[1].t_end = 4.5;
    windows[1].class_id = 0;
    windows[1].source_id = "clip_b";
    windows[1].n_valid_frames = 28;
    std::ostringstream out;
    write_msi_csv(out, windows);
    std::istringstream in(out.str());
    auto back = read_msi_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].msi == windows[0].msi);
    CHECK(back[1].msi == windows[1].msi);
    CHECK(back[1].t_start == 1.5);
    CHECK(back[0].class_id == 2);
    CHECK(back[0].source_id == "clip_a");
    CHECK(back[1].n_valid_frames == 28);
}
