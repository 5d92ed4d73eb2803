#pragma once

#include <functional>
#include <vector>

#include "msihar/types.hpp"

namespace msihar {

// Single grayscale frame with intensities in [0, 1].
class GrayFrame {
public:
    GrayFrame(int height, int width, std::vector<double> intensities);

    int height() const { return height_; }
    int width() const { return width_; }
    double at(int row, int col) const {
        return intensities_[static_cast<std::size_t>(row) * width_ + col];
    }
    const std::vector<double>& intensities() const { return intensities_; }

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> intensities_;
};

struct HornSchunckParams {
    double alpha = 1.0;
    int iterations = 100;
    double convergence_eps = 1e-4;
};

// Divide the vertical component by frame height and the horizontal one by
// frame width. Rejects fields that are already normalized.
FlowField normalize_flow(const FlowField& raw);

// Called after every Jacobi sweep with the current displacement planes,
// row-major doubles. Used by tests to track the energy trajectory.
using SweepObserver =
    std::function<void(const std::vector<double>& u, const std::vector<double>& v)>;

// Classic Horn-Schunck estimation between two frames of equal size.
// Spatial derivatives come from the mean of the two frames with clamped
// central differences, the temporal derivative is b - a. Returns raw
// (unnormalized) flow in pixels per frame.
FlowField horn_schunck(const GrayFrame& a, const GrayFrame& b,
                       const HornSchunckParams& params,
                       const SweepObserver& observer = {});

// Discrete Horn-Schunck objective for the displacement planes (u, v):
// data term plus alpha^2/4-weighted squared neighbor differences. The
// Jacobi sweep in horn_schunck drives this quantity down.
double horn_schunck_energy(const GrayFrame& a, const GrayFrame& b,
                           const std::vector<double>& u,
                           const std::vector<double>& v, double alpha);

}  // namespace msihar
