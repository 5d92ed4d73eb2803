#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "msihar/errors.hpp"
#include "msihar/types.hpp"

namespace msihar {

struct MsiParams {
    double patch_fraction = 0.02;
    double w = 100.0;
    double min_valid_fraction = 0.5;
    double min_confidence = 0.3;
};

// One scored video window: per-frame patch magnitudes plus the collapsed index.
struct MsiWindow {
    std::vector<double> per_frame;
    double msi = 1.0;
    double t_start = 0.0;
    double t_end = 0.0;
    int class_id = -1;
    std::string source_id;
    std::size_t n_valid_frames = 0;
};

// Side length of the square patch: round(fraction * max(H, W)), made odd so it
// centers on a pixel, never below 3.
int patch_size(int height, int width, double fraction = 0.02);

// Average normalized flow magnitude over the K x K patch centered at the
// keypoint. Border patches use whatever pixels fall inside the frame.
double msi_frame(const FlowField& flow, double x, double y, int patch);

// exp(-w * population std) of the per-frame values.
double msi_window(const std::vector<double>& per_frame, double w = 100.0);

MsiWindow window_msi_for_segment(const FlowSequence& seq, const PoseTrack& pose,
                                 double t_start, double t_end,
                                 const MsiParams& params = {});

// Most likely value of the MSI distribution: Gaussian KDE with Silverman's
// bandwidth on a 1001-point grid over [0, 1], ties broken toward the smaller
// grid value.
double class_msi_mode(const std::vector<double>& values);

double silverman_bandwidth(const std::vector<double>& values);

void write_msi_csv(std::ostream& out, const std::vector<MsiWindow>& windows);
std::vector<MsiWindow> read_msi_csv(std::istream& in);

}  // namespace msihar
