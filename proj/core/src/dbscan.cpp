#include "msihar/dbscan.hpp"

#include <algorithm>
#include <ostream>

#include "msihar/csv_io.hpp"

namespace msihar {
namespace {

constexpr int kUndefined = -2;
constexpr int kNoise = -1;

// Ascending indices with |times[j] - times[i]| <= eps, found by widening from
// i in the sorted array.
std::vector<std::size_t> neighborhood(const std::vector<double>& times,
                                      std::size_t i, double eps) {
    std::size_t lo = i;
    while (lo > 0 && times[i] - times[lo - 1] <= eps) --lo;
    std::size_t hi = i;
    while (hi + 1 < times.size() && times[hi + 1] - times[i] <= eps) ++hi;
    std::vector<std::size_t> out;
    out.reserve(hi - lo + 1);
    for (std::size_t j = lo; j <= hi; ++j) out.push_back(j);
    return out;
}

}  // namespace

DbscanResult dbscan_1d(const std::vector<double>& times,
                       const MomentParams& params) {
    if (!(params.eps_s >= 0.0) || params.min_pts < 1) {
        throw ConfigInvalid("dbscan needs eps >= 0 and min_pts >= 1");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw UnsortedInput("dbscan_1d expects ascending times");
    }
    const std::size_t n = times.size();
    std::vector<int> label(n, kUndefined);
    int next_cluster = 0;
    const std::size_t min_pts = static_cast<std::size_t>(params.min_pts);

    for (std::size_t p = 0; p < n; ++p) {
        if (label[p] != kUndefined) continue;
        auto nbrs = neighborhood(times, p, params.eps_s);
        if (nbrs.size() < min_pts) {
            label[p] = kNoise;
            continue;
        }
        const int cluster = next_cluster++;
        label[p] = cluster;
        std::vector<std::size_t> seeds;
        for (std::size_t q : nbrs) {
            if (q != p) seeds.push_back(q);
        }
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const std::size_t q = seeds[s];
            if (label[q] == kNoise) label[q] = cluster;  // border point
            if (label[q] != kUndefined) continue;
            label[q] = cluster;
            auto qn = neighborhood(times, q, params.eps_s);
            if (qn.size() >= min_pts) {
                seeds.insert(seeds.end(), qn.begin(), qn.end());
            }
        }
    }

    DbscanResult result;
    result.clusters.resize(next_cluster);
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == kNoise) {
            result.noise.push_back(i);
        } else if (label[i] >= 0) {
            result.clusters[label[i]].push_back(i);
        }
    }
    return result;
}

std::vector<int> moments_to_window_labels(
    const std::vector<std::vector<std::size_t>>& clusters,
    const std::vector<std::size_t>& positive_window_indices,
    std::size_t n_windows, int positive_class, int negative_class) {
    std::vector<int> labels(n_windows, negative_class);
    for (const auto& cluster : clusters) {
        for (std::size_t member : cluster) {
            labels.at(positive_window_indices.at(member)) = positive_class;
        }
    }
    return labels;
}

std::vector<Moment> clusters_to_moments(
    const std::vector<std::vector<std::size_t>>& clusters,
    const std::vector<double>& times, int first_cluster_id) {
    std::vector<Moment> moments;
    moments.reserve(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (clusters[c].empty()) continue;
        Moment m;
        m.cluster_id = first_cluster_id + static_cast<int>(c);
        m.n_windows = clusters[c].size();
        double lo = times.at(clusters[c].front());
        double hi = lo;
        for (std::size_t member : clusters[c]) {
            lo = std::min(lo, times.at(member));
            hi = std::max(hi, times.at(member));
        }
        m.t_start = lo;
        m.t_end = hi;
        moments.push_back(m);
    }
    return moments;
}

void write_moment_csv(std::ostream& out, const std::vector<Moment>& moments) {
    out << "cluster_id,t_start,t_end,n_windows\n";
    for (const auto& m : moments) {
        out << m.cluster_id << ',' << format_double(m.t_start) << ','
            << format_double(m.t_end) << ',' << m.n_windows << '\n';
    }
}

}  // namespace msihar
