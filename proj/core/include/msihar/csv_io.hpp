#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msihar/types.hpp"

namespace msihar {

// Shortest decimal representation that parses back to the same double.
// All CSV emitters use this so repeated runs produce identical bytes.
std::string format_double(double value);

// Splits one CSV line on commas; fields in our formats never contain
// commas or quotes.
std::vector<std::string> split_csv_line(const std::string& line);

// Pose CSV with header "frame,joint,x,y,conf".
PoseTrack load_pose_track(const std::filesystem::path& path, int target_joint = 10);
void write_pose_track(const PoseTrack& track, const std::filesystem::path& path);

// IMU CSV with header "t,ax,ay,az,label". Lines before the header of the
// form "# key=value" carry metadata (unit, subject). The nominal rate is
// estimated as (n-1)/(t_last-t_first).
ImuSeries load_imu_csv(const std::filesystem::path& path, Provenance provenance);
void write_imu_csv(const ImuSeries& series, const std::filesystem::path& path);

}  // namespace msihar
