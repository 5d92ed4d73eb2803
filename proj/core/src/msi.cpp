#include "msihar/msi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "msihar/csv_io.hpp"

namespace msihar {

int patch_size(int height, int width, double fraction) {
    const int larger = std::max(height, width);
    int k = static_cast<int>(std::llround(fraction * larger));
    if (k % 2 == 0) ++k;
    return std::max(k, 3);
}

double msi_frame(const FlowField& flow, double x, double y, int patch) {
    if (!flow.normalized()) {
        throw ConfigInvalid("msi_frame needs normalized flow");
    }
    const int col = static_cast<int>(std::llround(x));
    const int row = static_cast<int>(std::llround(y));
    if (row < 0 || row >= flow.height() || col < 0 || col >= flow.width()) {
        throw KeypointOutsideFrame("keypoint (" + std::to_string(x) + ", " +
                                   std::to_string(y) + ") outside " +
                                   std::to_string(flow.width()) + "x" +
                                   std::to_string(flow.height()) + " frame");
    }
    const int half = patch / 2;
    const int r0 = std::max(row - half, 0);
    const int r1 = std::min(row + half, flow.height() - 1);
    const int c0 = std::max(col - half, 0);
    const int c1 = std::min(col + half, flow.width() - 1);
    double sum = 0.0;
    int count = 0;
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const double u = flow.u_at(r, c);
            const double v = flow.v_at(r, c);
            sum += std::sqrt(u * u + v * v);
            ++count;
        }
    }
    return sum / count;
}

double msi_window(const std::vector<double>& per_frame, double w) {
    if (per_frame.empty()) {
        throw EmptySequence("msi_window needs at least one frame value");
    }
    const double n = static_cast<double>(per_frame.size());
    double mean = 0.0;
    for (double v : per_frame) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : per_frame) var += (v - mean) * (v - mean);
    var /= n;
    return std::exp(-w * std::sqrt(var));
}

MsiWindow window_msi_for_segment(const FlowSequence& seq, const PoseTrack& pose,
                                 double t_start, double t_end,
                                 const MsiParams& params) {
    const double span = seq.duration_s();
    if (!(t_start >= 0.0) || !(t_end > t_start) || t_end > span + 1e-9) {
        throw SegmentOutOfRange("segment [" + format_double(t_start) + ", " +
                                format_double(t_end) + "] outside 0.." +
                                format_double(span));
    }
    // Frame i covers [i/fps, (i+1)/fps); take frames whose interval start lies
    // inside the segment.
    const double fps = seq.fps();
    const std::size_t first =
        static_cast<std::size_t>(std::ceil(t_start * fps - 1e-9));
    std::size_t last = static_cast<std::size_t>(std::floor(t_end * fps - 1e-9));
    if (last >= seq.frames().size()) last = seq.frames().size() - 1;
    if (first > last) {
        throw SegmentOutOfRange("segment covers no frames");
    }

    const int k = patch_size(seq.height(), seq.width(), params.patch_fraction);
    std::vector<double> per_frame;
    per_frame.reserve(last - first + 1);
    const std::size_t total = last - first + 1;
    for (std::size_t f = first; f <= last; ++f) {
        const auto kp = pose.find_target(static_cast<int>(f));
        if (!kp.has_value() || kp->confidence < params.min_confidence) continue;
        per_frame.push_back(msi_frame(seq.frames()[f], kp->x, kp->y, k));
    }
    if (per_frame.empty() ||
        static_cast<double>(per_frame.size()) <
            params.min_valid_fraction * static_cast<double>(total)) {
        throw InsufficientValidFrames(
            std::to_string(per_frame.size()) + " of " + std::to_string(total) +
            " frames usable in [" + format_double(t_start) + ", " +
            format_double(t_end) + "]");
    }

    MsiWindow win;
    win.msi = msi_window(per_frame, params.w);
    win.per_frame = std::move(per_frame);
    win.t_start = t_start;
    win.t_end = t_end;
    win.source_id = seq.source_id();
    win.n_valid_frames = win.per_frame.size();
    return win;
}

double silverman_bandwidth(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    const double sd = std::sqrt(var);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * (n - 1.0);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);

    const double spread = std::min(sd, iqr / 1.34);
    const double h = 0.9 * spread * std::pow(n, -0.2);
    return std::max(h, 1e-3);
}

double class_msi_mode(const std::vector<double>& values) {
    if (values.empty()) {
        throw EmptyInput("class_msi_mode needs at least one value");
    }
    const double h = silverman_bandwidth(values);
    constexpr int kGridPoints = 1001;
    double best_density = -1.0;
    double best_x = 0.0;
    for (int g = 0; g < kGridPoints; ++g) {
        const double x = static_cast<double>(g) / (kGridPoints - 1);
        double density = 0.0;
        for (double v : values) {
            const double z = (x - v) / h;
            density += std::exp(-0.5 * z * z);
        }
        // Strict > keeps the smaller grid value on ties.
        if (density > best_density) {
            best_density = density;
            best_x = x;
        }
    }
    return best_x;
}

void write_msi_csv(std::ostream& out, const std::vector<MsiWindow>& windows) {
    out << "source_id,class,t_start,t_end,msi,n_valid_frames\n";
    for (const auto& w : windows) {
        out << w.source_id << ',' << w.class_id << ',' << format_double(w.t_start)
            << ',' << format_double(w.t_end) << ',' << format_double(w.msi) << ','
            << w.n_valid_frames << '\n';
    }
}

std::vector<MsiWindow> read_msi_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        line != "source_id,class,t_start,t_end,msi,n_valid_frames") {
        throw MalformedHeader("expected MSI CSV header, got \"" + line + "\"");
    }
    std::vector<MsiWindow> windows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected 6 fields");
        }
        MsiWindow w;
        try {
            w.source_id = fields[0];
            w.class_id = std::stoi(fields[1]);
            w.t_start = std::stod(fields[2]);
            w.t_end = std::stod(fields[3]);
            w.msi = std::stod(fields[4]);
            w.n_valid_frames = static_cast<std::size_t>(std::stoul(fields[5]));
        } catch (const std::exception&) {
            throw MalformedRow("line " + std::to_string(line_no) + ": bad numeric field");
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

}  // namespace msihar
