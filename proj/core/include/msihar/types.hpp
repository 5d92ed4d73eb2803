#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msihar/errors.hpp"

namespace msihar {

// Dense per-pixel displacement field between one consecutive frame pair.
// u holds the vertical component (rows), v the horizontal one (columns).
// Once normalized, u is divided by frame height and v by frame width.
class FlowField {
public:
    FlowField(int height, int width, std::vector<float> u, std::vector<float> v,
              bool normalized);

    int height() const { return height_; }
    int width() const { return width_; }
    bool normalized() const { return normalized_; }

    float u_at(int row, int col) const { return u_[idx(row, col)]; }
    float v_at(int row, int col) const { return v_[idx(row, col)]; }

    const std::vector<float>& u() const { return u_; }
    const std::vector<float>& v() const { return v_; }

private:
    std::size_t idx(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<float> u_;
    std::vector<float> v_;
    bool normalized_ = false;
};

// Ordered flow fields for a clip, one per consecutive frame pair.
// Flow frame i covers the time interval [i/fps, (i+1)/fps).
class FlowSequence {
public:
    FlowSequence(std::vector<FlowField> frames, double fps, std::string source_id);

    const std::vector<FlowField>& frames() const { return frames_; }
    double fps() const { return fps_; }
    const std::string& source_id() const { return source_id_; }

    int height() const { return frames_.front().height(); }
    int width() const { return frames_.front().width(); }
    bool normalized() const { return frames_.front().normalized(); }
    double duration_s() const { return static_cast<double>(frames_.size()) / fps_; }

private:
    std::vector<FlowField> frames_;
    double fps_ = 0.0;
    std::string source_id_;
};

// One detected 2D keypoint observation.
struct PoseEntry {
    int frame = 0;
    int joint = 0;  // COCO-17 index
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;
};

// Time-indexed keypoint track for a single person, sorted by frame index.
// target_joint names the joint standing in for the on-body sensor
// (COCO index 10 = right wrist).
class PoseTrack {
public:
    PoseTrack(std::vector<PoseEntry> entries, int target_joint);

    const std::vector<PoseEntry>& entries() const { return entries_; }
    int target_joint() const { return target_joint_; }

    // First entry for (frame, target_joint), if any.
    std::optional<PoseEntry> find_target(int frame) const;

private:
    std::vector<PoseEntry> entries_;
    int target_joint_ = 10;
};

enum class Provenance { Real, Virtual };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Timestamped tri-axial accelerometry with per-sample class labels.
class ImuSeries {
public:
    ImuSeries(std::vector<double> timestamps,
              std::vector<std::array<double, 3>> samples, std::vector<int> labels,
              double rate_hz, Provenance provenance, std::string subject_id,
              std::string unit = "m/s2");

    const std::vector<double>& timestamps() const { return timestamps_; }
    const std::vector<std::array<double, 3>>& samples() const { return samples_; }
    const std::vector<int>& labels() const { return labels_; }
    double rate_hz() const { return rate_hz_; }
    Provenance provenance() const { return provenance_; }
    const std::string& subject_id() const { return subject_id_; }
    const std::string& unit() const { return unit_; }

    std::size_t size() const { return timestamps_.size(); }

private:
    std::vector<double> timestamps_;
    std::vector<std::array<double, 3>> samples_;
    std::vector<int> labels_;
    double rate_hz_ = 0.0;
    Provenance provenance_ = Provenance::Real;
    std::string subject_id_;
    std::string unit_;
};

}  // namespace msihar
