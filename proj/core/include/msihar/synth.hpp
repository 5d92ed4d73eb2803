#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "msihar/types.hpp"

namespace msihar {

// Controls for the generated desk-scale fixture. Each class moves a single
// keypoint periodically (a fundamental plus random overtones); amplitudes
// grow geometrically from base_amplitude_px to
// base_amplitude_px * amplitude_span across classes, frequencies rise in
// small steps, and every real stream draws its own amplitude within
// amp_jitter of the class nominal; videos draw within video_amp_jitter,
// a wider band, since public video corpora are more diverse than a
// recruited wearer cohort. Real training
// streams draw from the upper half of that band while test streams span
// all of it, so part of each class is unseen in real training data.
// Virtual streams are double-differentiated keypoint tracks whose error is
// slow tracker drift at body-motion frequencies; the resulting acceleration
// floor swamps the subtle classes but leaves the large ones informative.
struct SynthParams {
    int n_classes = 5;
    int videos_per_class = 4;
    double video_seconds = 40.0;
    double video_fps = 10.0;
    int frame_height = 48;
    int frame_width = 48;
    int real_train_per_class = 2;
    int real_test_per_class = 2;
    double real_seconds = 40.0;
    double real_rate_hz = 25.0;
    double base_amplitude_px = 0.5;
    double amplitude_span = 20.0;
    double base_freq_hz = 0.5;
    double freq_step_hz = 0.05;
    double bump_sigma_px = 6.0;
    double tracker_noise_px = 0.5;
    double sensor_noise = 0.05;
    double baseline_wander = 0.06;
    double amp_jitter = 1.5;
    double video_amp_jitter = 1.5;
    double px_to_m = 0.01;
    double pose_confidence = 0.9;
    int target_joint = 10;
    std::uint64_t seed = 1;
};

struct SynthSummary {
    std::vector<double> class_amplitude_px;
    std::vector<double> class_freq_hz;
    std::filesystem::path manifest_path;
};

// Writes flow files, pose tracks, real and virtual IMU CSVs, and the
// manifest tying them together under out_dir.
SynthSummary generate_fixture(const SynthParams& params,
                              const std::filesystem::path& out_dir);

}  // namespace msihar
