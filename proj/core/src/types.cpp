#include "msihar/types.hpp"

#include <algorithm>
#include <cmath>

namespace msihar {

FlowField::FlowField(int height, int width, std::vector<float> u,
                     std::vector<float> v, bool normalized)
    : height_(height), width_(width), u_(std::move(u)), v_(std::move(v)),
      normalized_(normalized) {
    if (height_ < 1 || width_ < 1) {
        throw DimensionMismatch("flow field must be at least 1x1");
    }
    const std::size_t expected =
        static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    if (u_.size() != expected || v_.size() != expected) {
        throw DimensionMismatch("flow plane size does not match H*W");
    }
    for (std::size_t i = 0; i < expected; ++i) {
        if (!std::isfinite(u_[i]) || !std::isfinite(v_[i])) {
            throw NonFiniteValue("flow field contains NaN or Inf");
        }
    }
}

FlowSequence::FlowSequence(std::vector<FlowField> frames, double fps,
                           std::string source_id)
    : frames_(std::move(frames)), fps_(fps), source_id_(std::move(source_id)) {
    if (frames_.empty()) {
        throw DimensionMismatch("flow sequence needs at least one frame");
    }
    if (!(fps_ > 0.0)) {
        throw MalformedHeader("fps must be positive");
    }
    const auto& first = frames_.front();
    for (const auto& f : frames_) {
        if (f.height() != first.height() || f.width() != first.width()) {
            throw DimensionMismatch("flow frames disagree on dimensions");
        }
        if (f.normalized() != first.normalized()) {
            throw DimensionMismatch("flow frames mix normalized and raw data");
        }
    }
}

PoseTrack::PoseTrack(std::vector<PoseEntry> entries, int target_joint)
    : entries_(std::move(entries)), target_joint_(target_joint) {
    for (const auto& e : entries_) {
        if (e.confidence < 0.0 || e.confidence > 1.0) {
            throw ConfidenceOutOfRange("confidence must lie in [0,1]");
        }
        if (e.joint < 0 || e.joint > 16) {
            throw MalformedRow("joint index outside COCO-17 range");
        }
    }
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const PoseEntry& a, const PoseEntry& b) {
                         return a.frame < b.frame;
                     });
}

std::optional<PoseEntry> PoseTrack::find_target(int frame) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), frame,
                               [](const PoseEntry& e, int f) { return e.frame < f; });
    for (; it != entries_.end() && it->frame == frame; ++it) {
        if (it->joint == target_joint_) return *it;
    }
    return std::nullopt;
}

const char* to_string(Provenance p) {
    return p == Provenance::Real ? "real" : "virtual";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "real") return Provenance::Real;
    if (s == "virtual") return Provenance::Virtual;
    throw MalformedRow("unknown provenance '" + s + "'");
}

ImuSeries::ImuSeries(std::vector<double> timestamps,
                     std::vector<std::array<double, 3>> samples,
                     std::vector<int> labels, double rate_hz,
                     Provenance provenance, std::string subject_id,
                     std::string unit)
    : timestamps_(std::move(timestamps)), samples_(std::move(samples)),
      labels_(std::move(labels)), rate_hz_(rate_hz), provenance_(provenance),
      subject_id_(std::move(subject_id)), unit_(std::move(unit)) {
    if (samples_.size() != timestamps_.size() || labels_.size() != timestamps_.size()) {
        throw DimensionMismatch("timestamps, samples and labels must align");
    }
    if (!(rate_hz_ > 0.0)) {
        throw MalformedHeader("rate_hz must be positive");
    }
    for (std::size_t i = 1; i < timestamps_.size(); ++i) {
        if (!(timestamps_[i] > timestamps_[i - 1])) {
            throw NonMonotonicTime("timestamps must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
        if (!std::isfinite(timestamps_[i]) || !std::isfinite(samples_[i][0]) ||
            !std::isfinite(samples_[i][1]) || !std::isfinite(samples_[i][2])) {
            throw NonFiniteValue("IMU series contains NaN or Inf");
        }
    }
}

}  // namespace msihar
