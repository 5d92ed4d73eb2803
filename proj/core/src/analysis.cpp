#include "msihar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "msihar/detail/json.hpp"

#include "msihar/csv_io.hpp"
#include "msihar/special.hpp"

namespace msihar {
namespace {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // population
};

MeanVar mean_var(const std::vector<double>& v) {
    MeanVar mv;
    const double n = static_cast<double>(v.size());
    for (double x : v) mv.mean += x;
    mv.mean /= n;
    for (double x : v) mv.var += (x - mv.mean) * (x - mv.mean);
    mv.var /= n;
    return mv;
}

double pearson_r_only(const std::vector<double>& x, const std::vector<double>& y) {
    const MeanVar mx = mean_var(x);
    const MeanVar my = mean_var(y);
    if (mx.var == 0.0 || my.var == 0.0) {
        throw ZeroVariance("correlation input has a constant variable");
    }
    double cov = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx.mean) * (y[i] - my.mean);
    }
    cov /= static_cast<double>(x.size());
    return std::clamp(cov / std::sqrt(mx.var * my.var), -1.0, 1.0);
}

}  // namespace

PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw LengthMismatch("pearson inputs differ in length");
    }
    if (x.size() < 3) {
        throw TooFewPoints("pearson needs at least 3 points");
    }
    PearsonResult result;
    result.n = x.size();
    result.r = pearson_r_only(x, y);
    const double nu = static_cast<double>(result.n - 2);
    const double denom = 1.0 - result.r * result.r;
    if (denom <= 0.0) {
        result.p = 0.0;
    } else {
        const double t = result.r * std::sqrt(nu / denom);
        result.p = student_t_two_sided_p(t, nu);
    }
    return result;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // 1-based ranks i+1..j+1 share the average.
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw LengthMismatch("spearman inputs differ in length");
    }
    if (x.size() < 3) {
        throw TooFewPoints("spearman needs at least 3 points");
    }
    return pearson_r_only(average_ranks(x), average_ranks(y));
}

LineFit fit_line_zero_crossing(const std::vector<Point>& points) {
    if (points.size() < 2) {
        throw TooFewPoints("line fit needs at least 2 points");
    }
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (sxx == 0.0) {
        throw DegenerateX("line fit needs at least two distinct x values");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (fit.slope != 0.0) {
        fit.x0 = -fit.intercept / fit.slope;
    }
    return fit;
}

namespace {

constexpr int kDegree = 3;

// Knot span index j with knots[j] <= x < knots[j+1], clamped so the basis
// window stays valid at x == x_max.
std::size_t find_span(const std::vector<double>& knots, double x) {
    const std::size_t last = knots.size() - kDegree - 2;
    std::size_t lo = kDegree;
    std::size_t hi = last;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (knots[mid] <= x) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

// Cox-de Boor recursion: the kDegree+1 basis values that are nonzero on the
// span, basis[r] belonging to control index span - kDegree + r.
void basis_functions(const std::vector<double>& knots, std::size_t span, double x,
                     double basis[kDegree + 1]) {
    double left[kDegree + 1];
    double right[kDegree + 1];
    basis[0] = 1.0;
    for (int d = 1; d <= kDegree; ++d) {
        left[d] = x - knots[span + 1 - d];
        right[d] = knots[span + d] - x;
        double saved = 0.0;
        for (int r = 0; r < d; ++r) {
            const double denom = right[r + 1] + left[d - r];
            const double temp = denom != 0.0 ? basis[r] / denom : 0.0;
            basis[r] = saved + right[r + 1] * temp;
            saved = left[d - r] * temp;
        }
        basis[d] = saved;
    }
}

// Dense symmetric positive definite solve; returns false when a pivot
// collapses.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                sum -= a[i * n + k] * a[j * n + k];
            }
            if (i == j) {
                if (sum <= 0.0) return false;
                a[i * n + i] = std::sqrt(sum);
            } else {
                a[i * n + j] = sum / a[j * n + j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a[i * n + k] * b[k];
        b[i] = sum / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= a[k * n + ii] * b[k];
        b[ii] = sum / a[ii * n + ii];
    }
    return true;
}

}  // namespace

double Spline::operator()(double x) const {
    const double xc = std::clamp(x, x_min, x_max);
    const std::size_t span = find_span(knots, xc);
    double basis[kDegree + 1];
    basis_functions(knots, span, xc, basis);
    double value = 0.0;
    for (int r = 0; r <= kDegree; ++r) {
        value += basis[r] * coeffs[span - kDegree + r];
    }
    return value;
}

SplineFit fit_spline(const std::vector<Point>& points, int n_knots) {
    if (n_knots < 0) {
        throw ConfigInvalid("n_knots must be nonnegative");
    }
    if (points.size() < static_cast<std::size_t>(n_knots) + 2) {
        throw TooFewPoints("spline fit needs at least n_knots + 2 points");
    }
    std::set<double> xs;
    double x_min = points.front().x;
    double x_max = points.front().x;
    for (const auto& p : points) {
        if (!xs.insert(p.x).second) {
            throw DegenerateX("spline fit needs distinct x values");
        }
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
    }
    if (x_min == x_max) {
        throw DegenerateX("spline fit needs a nonzero x range");
    }

    Spline spline;
    spline.x_min = x_min;
    spline.x_max = x_max;
    for (int i = 0; i <= kDegree; ++i) spline.knots.push_back(x_min);
    for (int i = 1; i <= n_knots; ++i) {
        spline.knots.push_back(x_min + (x_max - x_min) * i / (n_knots + 1));
    }
    for (int i = 0; i <= kDegree; ++i) spline.knots.push_back(x_max);

    const std::size_t n_basis = static_cast<std::size_t>(n_knots) + kDegree + 1;
    std::vector<double> normal(n_basis * n_basis, 0.0);
    std::vector<double> rhs(n_basis, 0.0);
    for (const auto& p : points) {
        const std::size_t span = find_span(spline.knots, p.x);
        double basis[kDegree + 1];
        basis_functions(spline.knots, span, p.x, basis);
        const std::size_t first = span - kDegree;
        for (int r = 0; r <= kDegree; ++r) {
            rhs[first + r] += basis[r] * p.y;
            for (int s = 0; s <= kDegree; ++s) {
                normal[(first + r) * n_basis + (first + s)] += basis[r] * basis[s];
            }
        }
    }

    double ridge = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> a = normal;
        std::vector<double> b = rhs;
        if (ridge > 0.0) {
            for (std::size_t i = 0; i < n_basis; ++i) a[i * n_basis + i] += ridge;
        }
        if (cholesky_solve(a, b, n_basis)) {
            spline.coeffs = std::move(b);
            break;
        }
        ridge = ridge == 0.0 ? 1e-10 : ridge * 100.0;
    }
    if (spline.coeffs.empty()) {
        throw DegenerateX("spline normal equations are singular");
    }

    SplineFit fit;
    fit.spline = std::move(spline);

    constexpr int kGrid = 2000;
    double prev_x = fit.spline.x_min;
    double prev_y = fit.spline(prev_x);
    for (int i = 1; i <= kGrid; ++i) {
        const double x =
            fit.spline.x_min + (fit.spline.x_max - fit.spline.x_min) * i / kGrid;
        const double y = fit.spline(x);
        if (prev_y > 0.0 && y <= 0.0) {
            double lo = prev_x, hi = x;
            for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                (fit.spline(mid) > 0.0 ? lo : hi) = mid;
            }
            fit.zero_crossing = 0.5 * (lo + hi);
            break;
        }
        prev_x = x;
        prev_y = y;
    }
    return fit;
}

SweepMode sweep_mode_from_string(const std::string& s) {
    if (s == "include_classes") return SweepMode::IncludeClasses;
    if (s == "virtual_only") return SweepMode::VirtualOnly;
    throw ConfigInvalid("unknown sweep mode \"" + s + "\"");
}

std::string to_string(SweepMode mode) {
    return mode == SweepMode::IncludeClasses ? "include_classes" : "virtual_only";
}

std::vector<SweepPoint> cutoff_sweep(
    const std::map<int, double>& class_cmsi,
    const std::function<double(const std::vector<int>&)>& evaluate,
    SweepMode mode) {
    (void)mode;  // both modes share the threshold rule; the callback decides
                 // whether the set restricts the task or gates virtual data
    if (class_cmsi.empty()) {
        throw EmptyClassSet("cutoff_sweep needs at least one class");
    }
    std::set<double> cutoffs;
    for (const auto& [cls, cmsi] : class_cmsi) cutoffs.insert(cmsi);
    std::vector<SweepPoint> points;
    points.reserve(cutoffs.size());
    for (double cutoff : cutoffs) {
        SweepPoint point;
        point.msi_cutoff = cutoff;
        for (const auto& [cls, cmsi] : class_cmsi) {
            if (cmsi <= cutoff) point.included_classes.push_back(cls);
        }
        point.delta_f1 = evaluate(point.included_classes);
        points.push_back(std::move(point));
    }
    return points;
}

SweepReport analyze_sweep(const std::vector<SweepPoint>& points,
                          int spline_knots) {
    if (points.size() < 3) {
        throw TooFewPoints("sweep analysis needs at least 3 points");
    }
    SweepReport report;
    report.points = points;
    std::vector<double> xs, ys;
    std::vector<Point> pts;
    for (const auto& p : points) {
        xs.push_back(p.msi_cutoff);
        ys.push_back(p.delta_f1);
        pts.push_back({p.msi_cutoff, p.delta_f1});
    }
    const MeanVar yv = mean_var(ys);
    if (yv.var == 0.0) {
        // A flat sweep carries no correlation evidence; keep the report usable.
        report.correlation = {0.0, 1.0, points.size()};
    } else {
        report.correlation = pearson(xs, ys);
    }
    report.line = fit_line_zero_crossing(pts);
    report.zero_crossing = report.line.x0;
    const int max_knots = static_cast<int>(points.size()) - 2;
    report.spline = fit_spline(pts, std::min(spline_knots, max_knots));
    return report;
}

nlohmann::ordered_json sweep_report_json(const SweepReport& report) {
    nlohmann::ordered_json doc;
    doc["points"] = nlohmann::ordered_json::array();
    for (const auto& p : report.points) {
        doc["points"].push_back({{"msi_cutoff", p.msi_cutoff},
                                 {"delta_f1", p.delta_f1},
                                 {"included_classes", p.included_classes}});
    }
    doc["line"] = {{"slope", report.line.slope},
                   {"intercept", report.line.intercept}};
    doc["line"]["zero_crossing"] =
        report.line.x0.has_value() ? nlohmann::ordered_json(*report.line.x0)
                                   : nlohmann::ordered_json(nullptr);
    doc["pearson"] = {{"r", report.correlation.r},
                      {"p", report.correlation.p},
                      {"n", report.correlation.n}};
    doc["spline"] = {{"knots", report.spline.spline.knots},
                     {"coefficients", report.spline.spline.coeffs},
                     {"x_min", report.spline.spline.x_min},
                     {"x_max", report.spline.spline.x_max}};
    doc["spline"]["zero_crossing"] =
        report.spline.zero_crossing.has_value()
            ? nlohmann::ordered_json(*report.spline.zero_crossing)
            : nlohmann::ordered_json(nullptr);
    doc["zero_crossing"] = report.zero_crossing.has_value()
                               ? nlohmann::ordered_json(*report.zero_crossing)
                               : nlohmann::ordered_json(nullptr);
    return doc;
}

void write_sweep_points_csv(std::ostream& out,
                            const std::vector<SweepPoint>& points) {
    out << "cutoff,delta_f1\n";
    for (const auto& p : points) {
        out << format_double(p.msi_cutoff) << ',' << format_double(p.delta_f1)
            << '\n';
    }
}

void write_spline_samples_csv(std::ostream& out, const Spline& spline,
                              int n_samples) {
    out << "x,y_spline\n";
    for (int i = 0; i < n_samples; ++i) {
        const double x = spline.x_min +
                         (spline.x_max - spline.x_min) * i / (n_samples - 1);
        out << format_double(x) << ',' << format_double(spline(x)) << '\n';
    }
}

}  // namespace msihar
