#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msihar/types.hpp"

namespace msihar {

// One IMU recording referenced by a manifest. "split" partitions real data
// into train/test for hold-out protocols; cross-validation protocols ignore
// it. Virtual entries name the video they were synthesized from via
// "source" so analysis windows can be matched back to flow segments.
struct ImuEntry {
    std::filesystem::path path;
    Provenance provenance = Provenance::Real;
    std::string subject;
    std::string source;
    std::string split = "train";
};

// Video-side inputs for MSI computation.
struct VideoEntry {
    std::filesystem::path flow_path;
    std::filesystem::path pose_path;
    int class_id = 0;
    std::string id;
};

// JSON dataset manifest: class table plus the IMU and video file lists.
class DatasetManifest {
public:
    DatasetManifest(std::map<int, std::string> classes, std::vector<ImuEntry> imu,
                    std::vector<VideoEntry> videos);

    // Loads and validates; relative paths resolve against the manifest's
    // directory. Every path must exist and every class id referenced by a
    // video must be in the class table.
    static DatasetManifest load(const std::filesystem::path& path);

    const std::map<int, std::string>& classes() const { return classes_; }
    const std::vector<ImuEntry>& imu() const { return imu_; }
    const std::vector<VideoEntry>& videos() const { return videos_; }

    const std::string& class_name(int id) const;

private:
    std::map<int, std::string> classes_;
    std::vector<ImuEntry> imu_;
    std::vector<VideoEntry> videos_;
};

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace msihar
