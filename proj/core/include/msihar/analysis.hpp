#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msihar/detail/json.hpp"

#include "msihar/errors.hpp"

namespace msihar {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

// r from population covariance; two-sided p through Student's t with n-2
// degrees of freedom.
PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y);

// Rank correlation with average ranks on ties. Returns r of the rank vectors.
double spearman_r(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> average_ranks(const std::vector<double>& values);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::optional<double> x0;  // zero crossing, absent when slope == 0
};

LineFit fit_line_zero_crossing(const std::vector<Point>& points);

struct Spline {
    std::vector<double> knots;   // clamped cubic knot vector
    std::vector<double> coeffs;  // one per basis function
    double x_min = 0.0;
    double x_max = 0.0;

    double operator()(double x) const;  // x clamped to [x_min, x_max]
};

struct SplineFit {
    Spline spline;
    std::optional<double> zero_crossing;  // first crossing of 0 from above
};

// Least-squares clamped cubic B-spline with n_knots uniform interior knots.
SplineFit fit_spline(const std::vector<Point>& points, int n_knots = 5);

enum class SweepMode { IncludeClasses, VirtualOnly };

SweepMode sweep_mode_from_string(const std::string& s);
std::string to_string(SweepMode mode);

struct SweepPoint {
    double msi_cutoff = 0.0;
    double delta_f1 = 0.0;
    std::vector<int> included_classes;  // ascending class ids
};

// One point per distinct cMSI value, ascending. The callback receives the
// class ids at or below the cutoff; its return value is recorded as delta_f1.
std::vector<SweepPoint> cutoff_sweep(
    const std::map<int, double>& class_cmsi,
    const std::function<double(const std::vector<int>&)>& evaluate,
    SweepMode mode);

struct SweepReport {
    std::vector<SweepPoint> points;
    LineFit line;
    PearsonResult correlation;
    SplineFit spline;
    std::optional<double> zero_crossing;  // from the line fit
};

SweepReport analyze_sweep(const std::vector<SweepPoint>& points,
                          int spline_knots = 5);

nlohmann::ordered_json sweep_report_json(const SweepReport& report);

void write_sweep_points_csv(std::ostream& out,
                            const std::vector<SweepPoint>& points);
void write_spline_samples_csv(std::ostream& out, const Spline& spline,
                              int n_samples = 201);

}  // namespace msihar
