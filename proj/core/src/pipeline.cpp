#include "msihar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "msihar/csv_io.hpp"

namespace msihar {

FeatureSet feature_set_from_string(const std::string& s) {
    if (s == "ecdf") return FeatureSet::Ecdf;
    if (s == "stats") return FeatureSet::Stats;
    throw ConfigInvalid("unknown feature set \"" + s + "\"");
}

std::string to_string(FeatureSet fs) {
    return fs == FeatureSet::Ecdf ? "ecdf" : "stats";
}

AxisStats axis_stats(const ImuSeries& series) {
    AxisStats st;
    const double n = static_cast<double>(series.size());
    for (const auto& s : series.samples()) {
        for (int a = 0; a < 3; ++a) st.mean[a] += s[a];
    }
    for (int a = 0; a < 3; ++a) st.mean[a] /= n;
    for (const auto& s : series.samples()) {
        for (int a = 0; a < 3; ++a) {
            const double d = s[a] - st.mean[a];
            st.stddev[a] += d * d;
        }
    }
    for (int a = 0; a < 3; ++a) st.stddev[a] = std::sqrt(st.stddev[a] / n);
    return st;
}

AxisStats pooled_axis_stats(const std::vector<ImuSeries>& series) {
    std::size_t total = 0;
    for (const auto& s : series) total += s.size();
    if (total == 0) {
        throw EmptyReference("no reference samples to pool");
    }
    AxisStats st;
    const double n = static_cast<double>(total);
    for (const auto& s : series) {
        for (const auto& sample : s.samples()) {
            for (int a = 0; a < 3; ++a) st.mean[a] += sample[a];
        }
    }
    for (int a = 0; a < 3; ++a) st.mean[a] /= n;
    for (const auto& s : series) {
        for (const auto& sample : s.samples()) {
            for (int a = 0; a < 3; ++a) {
                const double d = sample[a] - st.mean[a];
                st.stddev[a] += d * d;
            }
        }
    }
    for (int a = 0; a < 3; ++a) st.stddev[a] = std::sqrt(st.stddev[a] / n);
    return st;
}

ImuSeries calibrate_virtual(const ImuSeries& virt, const AxisStats& source,
                            const AxisStats& reference) {
    for (int a = 0; a < 3; ++a) {
        if (source.stddev[a] == 0.0) {
            throw ZeroVarianceAxis("virtual axis " + std::to_string(a) +
                                   " is constant, cannot calibrate");
        }
    }
    std::vector<std::array<double, 3>> mapped = virt.samples();
    for (auto& s : mapped) {
        for (int a = 0; a < 3; ++a) {
            s[a] = (s[a] - source.mean[a]) / source.stddev[a] * reference.stddev[a] +
                   reference.mean[a];
        }
    }
    return ImuSeries(virt.timestamps(), std::move(mapped), virt.labels(),
                     virt.rate_hz(), virt.provenance(), virt.subject_id(),
                     virt.unit());
}

ImuSeries calibrate_virtual(const ImuSeries& virt, const AxisStats& reference) {
    return calibrate_virtual(virt, axis_stats(virt), reference);
}

ImuSeries calibrate_virtual(const ImuSeries& virt,
                            const std::vector<ImuSeries>& real_train) {
    return calibrate_virtual(virt, pooled_axis_stats(real_train));
}

std::size_t window_samples(double seconds, double rate_hz) {
    return static_cast<std::size_t>(std::floor(seconds * rate_hz + 0.5));
}

std::vector<RawWindow> segment(const ImuSeries& series, const WindowSpec& spec) {
    if (!(spec.length_s > 0.0) || !(spec.step_s > 0.0) ||
        spec.step_s > spec.length_s || !(spec.rate_hz > 0.0)) {
        throw ConfigInvalid("window spec needs 0 < step_s <= length_s and rate_hz > 0");
    }
    if (std::abs(series.rate_hz() - spec.rate_hz) > 0.01 * spec.rate_hz) {
        throw ConfigInvalid("series rate " + format_double(series.rate_hz()) +
                            " Hz does not match window spec rate " +
                            format_double(spec.rate_hz) + " Hz");
    }
    const std::size_t length = window_samples(spec.length_s, spec.rate_hz);
    const std::size_t step = window_samples(spec.step_s, spec.rate_hz);
    if (series.size() < length) {
        throw SeriesTooShort(std::to_string(series.size()) + " samples, window needs " +
                             std::to_string(length));
    }
    std::vector<RawWindow> windows;
    for (std::size_t start = 0; start + length <= series.size(); start += step) {
        RawWindow w;
        w.start = start;
        w.length = length;
        w.t_start = series.timestamps()[start];
        w.t_end = series.timestamps()[start + length - 1] + 1.0 / spec.rate_hz;
        std::map<int, std::size_t> votes;
        for (std::size_t i = start; i < start + length; ++i) {
            ++votes[series.labels()[i]];
        }
        std::size_t best = 0;
        for (const auto& [label, count] : votes) {
            // Map iteration is ascending, so > keeps the smaller id on ties.
            if (count > best) {
                best = count;
                w.label = label;
            }
        }
        windows.push_back(w);
    }
    return windows;
}

std::vector<double> ecdf_features(std::span<const std::array<double, 3>> samples,
                                  int points_per_axis) {
    if (samples.empty()) {
        throw EmptyWindow("ecdf_features on an empty window");
    }
    if (points_per_axis < 2) {
        throw ConfigInvalid("points_per_axis must be at least 2");
    }
    const std::size_t n = samples.size();
    std::vector<double> features;
    features.reserve(3 * (points_per_axis + 1));
    std::vector<double> axis(n);
    for (int a = 0; a < 3; ++a) {
        for (std::size_t i = 0; i < n; ++i) axis[i] = samples[i][a];
        std::sort(axis.begin(), axis.end());
        for (int k = 0; k < points_per_axis; ++k) {
            const double level = (k + 0.5) / points_per_axis;
            // sorted[i] sits at quantile (i + 0.5) / n.
            double pos = level * static_cast<double>(n) - 0.5;
            pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
            const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, n - 1);
            const double frac = pos - static_cast<double>(lo);
            features.push_back(axis[lo] + frac * (axis[hi] - axis[lo]));
        }
        double mean = 0.0;
        for (double v : axis) mean += v;
        features.push_back(mean / static_cast<double>(n));
    }
    return features;
}

std::vector<double> stat_features(std::span<const std::array<double, 3>> samples) {
    if (samples.empty()) {
        throw EmptyWindow("stat_features on an empty window");
    }
    const double n = static_cast<double>(samples.size());
    std::vector<double> features;
    features.reserve(15);
    for (int a = 0; a < 3; ++a) {
        double mean = 0.0;
        double sq = 0.0;
        for (const auto& s : samples) {
            mean += s[a];
            sq += s[a] * s[a];
        }
        mean /= n;
        sq /= n;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (const auto& s : samples) {
            const double d = s[a] - mean;
            const double d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        const double skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
        const double kurt = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
        features.push_back(mean);
        features.push_back(m2);
        features.push_back(skew);
        features.push_back(kurt);
        features.push_back(std::sqrt(sq));
    }
    return features;
}

std::vector<FeatureWindow> extract_windows(const ImuSeries& series,
                                           const WindowSpec& spec,
                                           FeatureSet feature_set,
                                           int ecdf_points) {
    std::vector<FeatureWindow> out;
    const auto raw = segment(series, spec);
    out.reserve(raw.size());
    const std::span<const std::array<double, 3>> all(series.samples());
    for (const auto& rw : raw) {
        FeatureWindow fw;
        const auto view = all.subspan(rw.start, rw.length);
        fw.features = feature_set == FeatureSet::Ecdf
                          ? ecdf_features(view, ecdf_points)
                          : stat_features(view);
        fw.label = rw.label;
        fw.provenance = series.provenance();
        fw.t_start = rw.t_start;
        fw.t_end = rw.t_end;
        fw.subject_id = series.subject_id();
        out.push_back(std::move(fw));
    }
    return out;
}

void write_feature_csv(std::ostream& out,
                       const std::vector<FeatureWindow>& windows) {
    std::size_t width = windows.empty() ? 0 : windows.front().features.size();
    out << "subject,source,provenance,t_start,t_end,label,msi";
    for (std::size_t i = 0; i < width; ++i) out << ",f" << i;
    out << '\n';
    for (const auto& w : windows) {
        if (w.features.size() != width) {
            throw DimensionMismatch("inconsistent feature width in window set");
        }
        out << w.subject_id << ',' << w.source_id << ',' << to_string(w.provenance)
            << ',' << format_double(w.t_start) << ',' << format_double(w.t_end)
            << ',' << w.label << ',';
        if (w.msi.has_value()) out << format_double(*w.msi);
        for (double f : w.features) out << ',' << format_double(f);
        out << '\n';
    }
}

std::vector<FeatureWindow> read_feature_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw MalformedHeader("empty feature CSV");
    }
    const auto header = split_csv_line(line);
    if (header.size() < 7 || header[0] != "subject" || header[1] != "source" ||
        header[2] != "provenance" || header[3] != "t_start" ||
        header[4] != "t_end" || header[5] != "label" || header[6] != "msi") {
        throw MalformedHeader("unexpected feature CSV header \"" + line + "\"");
    }
    const std::size_t width = header.size() - 7;
    std::vector<FeatureWindow> windows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields");
        }
        FeatureWindow w;
        try {
            w.subject_id = fields[0];
            w.source_id = fields[1];
            w.provenance = provenance_from_string(fields[2]);
            w.t_start = std::stod(fields[3]);
            w.t_end = std::stod(fields[4]);
            w.label = std::stoi(fields[5]);
            if (!fields[6].empty()) w.msi = std::stod(fields[6]);
            w.features.reserve(width);
            for (std::size_t i = 7; i < fields.size(); ++i) {
                w.features.push_back(std::stod(fields[i]));
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw MalformedRow("line " + std::to_string(line_no) + ": bad numeric field");
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

}  // namespace msihar
