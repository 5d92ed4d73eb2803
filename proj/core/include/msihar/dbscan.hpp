#pragma once

#include <iosfwd>
#include <vector>

#include "msihar/errors.hpp"

namespace msihar {

struct MomentParams {
    double eps_s = 80.0;
    int min_pts = 2;  // neighborhood size including the point itself
};

struct DbscanResult {
    std::vector<std::vector<std::size_t>> clusters;  // ascending indices each
    std::vector<std::size_t> noise;                  // ascending
};

// Classic DBSCAN on the 1-D metric |t_i - t_j| over ascending times. Cluster
// ids follow first-discovery order; border points join the cluster that
// reaches them first.
DbscanResult dbscan_1d(const std::vector<double>& times, const MomentParams& params);

// Binary relabeling at window granularity: windows inside any cluster are
// positive, noise positives and everything else negative.
// positive_window_indices[i] is the full-set index of the i-th clustered time.
std::vector<int> moments_to_window_labels(
    const std::vector<std::vector<std::size_t>>& clusters,
    const std::vector<std::size_t>& positive_window_indices,
    std::size_t n_windows, int positive_class = 1, int negative_class = 0);

struct Moment {
    int cluster_id = 0;
    double t_start = 0.0;  // earliest member center time
    double t_end = 0.0;    // latest member center time
    std::size_t n_windows = 0;
};

std::vector<Moment> clusters_to_moments(
    const std::vector<std::vector<std::size_t>>& clusters,
    const std::vector<double>& times, int first_cluster_id = 0);

void write_moment_csv(std::ostream& out, const std::vector<Moment>& moments);

}  // namespace msihar
