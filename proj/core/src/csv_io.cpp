#include "msihar/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace msihar {

std::string format_double(double value) {
    char buf[40];
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", value);
        return buf;
    }
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

namespace {

double parse_double(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw MalformedRow(std::string("cannot parse ") + what + " from '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s, const char* what) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw MalformedRow(std::string("cannot parse ") + what + " from '" + s + "'");
    }
    return static_cast<int>(v);
}

}  // namespace

PoseTrack load_pose_track(const std::filesystem::path& path, int target_joint) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedRow("cannot open pose file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) !=
        std::vector<std::string>{"frame", "joint", "x", "y", "conf"}) {
        throw MalformedRow("pose header must be 'frame,joint,x,y,conf'");
    }
    std::vector<PoseEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw MalformedRow("pose row needs 5 fields: '" + line + "'");
        }
        PoseEntry e;
        e.frame = parse_int(fields[0], "frame");
        e.joint = parse_int(fields[1], "joint");
        e.x = parse_double(fields[2], "x");
        e.y = parse_double(fields[3], "y");
        e.confidence = parse_double(fields[4], "conf");
        if (e.confidence < 0.0 || e.confidence > 1.0) {
            throw ConfidenceOutOfRange("conf " + fields[4] + " outside [0,1]");
        }
        entries.push_back(e);
    }
    return PoseTrack(std::move(entries), target_joint);
}

void write_pose_track(const PoseTrack& track, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataLoadFailed("cannot open '" + path.string() + "' for writing");
    }
    out << "frame,joint,x,y,conf\n";
    for (const auto& e : track.entries()) {
        out << e.frame << ',' << e.joint << ',' << format_double(e.x) << ','
            << format_double(e.y) << ',' << format_double(e.confidence) << '\n';
    }
}

ImuSeries load_imu_csv(const std::filesystem::path& path, Provenance provenance) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedRow("cannot open IMU file '" + path.string() + "'");
    }
    std::string unit = "m/s2";
    std::string subject = path.stem().string();
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                key.erase(key.find_last_not_of(' ') + 1);
                std::string value = line.substr(eq + 1);
                if (!value.empty() && value.back() == '\r') value.pop_back();
                if (key == "unit") unit = value;
                if (key == "subject") subject = value;
            }
            continue;
        }
        if (split_csv_line(line) !=
            std::vector<std::string>{"t", "ax", "ay", "az", "label"}) {
            throw MalformedRow("IMU header must be 't,ax,ay,az,label'");
        }
        header_seen = true;
        break;
    }
    if (!header_seen) {
        throw MalformedRow("IMU file has no header row");
    }

    std::vector<double> timestamps;
    std::vector<std::array<double, 3>> samples;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw MalformedRow("IMU row needs 5 fields: '" + line + "'");
        }
        const double t = parse_double(fields[0], "t");
        if (!timestamps.empty() && !(t > timestamps.back())) {
            throw NonMonotonicTime("t=" + fields[0] + " does not increase");
        }
        timestamps.push_back(t);
        samples.push_back({parse_double(fields[1], "ax"), parse_double(fields[2], "ay"),
                           parse_double(fields[3], "az")});
        labels.push_back(parse_int(fields[4], "label"));
    }
    if (timestamps.size() < 2) {
        throw MalformedRow("IMU file needs at least 2 samples");
    }
    const double rate_hz = static_cast<double>(timestamps.size() - 1) /
                           (timestamps.back() - timestamps.front());
    return ImuSeries(std::move(timestamps), std::move(samples), std::move(labels),
                     rate_hz, provenance, subject, unit);
}

void write_imu_csv(const ImuSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataLoadFailed("cannot open '" + path.string() + "' for writing");
    }
    out << "# unit=" << series.unit() << '\n';
    out << "# subject=" << series.subject_id() << '\n';
    out << "t,ax,ay,az,label\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series.samples()[i];
        out << format_double(series.timestamps()[i]) << ',' << format_double(s[0])
            << ',' << format_double(s[1]) << ',' << format_double(s[2]) << ','
            << series.labels()[i] << '\n';
    }
}

}  // namespace msihar
