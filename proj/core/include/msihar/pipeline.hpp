#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msihar/errors.hpp"
#include "msihar/types.hpp"

namespace msihar {

struct WindowSpec {
    double length_s = 3.0;
    double step_s = 1.5;
    double rate_hz = 25.0;
};

enum class FeatureSet { Ecdf, Stats };

FeatureSet feature_set_from_string(const std::string& s);
std::string to_string(FeatureSet fs);

struct FeatureWindow {
    std::vector<double> features;
    int label = -1;
    Provenance provenance = Provenance::Real;
    double t_start = 0.0;
    double t_end = 0.0;
    std::optional<double> msi;
    std::string subject_id;
    std::string source_id;
};

struct AxisStats {
    std::array<double, 3> mean{};
    std::array<double, 3> stddev{};
};

AxisStats axis_stats(const ImuSeries& series);

// Statistics over the concatenation of all samples in all series.
AxisStats pooled_axis_stats(const std::vector<ImuSeries>& series);

// Per-axis affine map taking the source moments onto the reference moments.
// Timestamps and labels pass through untouched. The explicit-source form
// applies one shared transform derived from corpus-level moments, preserving
// relative scale between streams; the two-argument forms match each series'
// own moments to the reference.
ImuSeries calibrate_virtual(const ImuSeries& virt, const AxisStats& source,
                            const AxisStats& reference);
ImuSeries calibrate_virtual(const ImuSeries& virt, const AxisStats& reference);
ImuSeries calibrate_virtual(const ImuSeries& virt,
                            const std::vector<ImuSeries>& real_train);

struct RawWindow {
    std::size_t start = 0;
    std::size_t length = 0;
    int label = -1;
    double t_start = 0.0;
    double t_end = 0.0;
};

// Sample counts use round-half-up so 1.5 s at 25 Hz gives a 38-sample step.
std::size_t window_samples(double seconds, double rate_hz);

// Sliding windows of L = round(length_s * rate_hz) samples every
// S = round(step_s * rate_hz) samples. Window label is the majority sample
// label, ties to the smaller class id.
std::vector<RawWindow> segment(const ImuSeries& series, const WindowSpec& spec);

std::vector<double> ecdf_features(std::span<const std::array<double, 3>> samples,
                                  int points_per_axis = 15);

std::vector<double> stat_features(std::span<const std::array<double, 3>> samples);

std::vector<FeatureWindow> extract_windows(const ImuSeries& series,
                                           const WindowSpec& spec,
                                           FeatureSet feature_set,
                                           int ecdf_points = 15);

void write_feature_csv(std::ostream& out,
                       const std::vector<FeatureWindow>& windows);
std::vector<FeatureWindow> read_feature_csv(std::istream& in);

}  // namespace msihar
