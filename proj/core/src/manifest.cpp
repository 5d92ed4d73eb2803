#include "msihar/manifest.hpp"

#include <fstream>

#include "msihar/detail/json.hpp"

namespace msihar {

namespace {
using ordered_json = nlohmann::ordered_json;
}

DatasetManifest::DatasetManifest(std::map<int, std::string> classes,
                                 std::vector<ImuEntry> imu,
                                 std::vector<VideoEntry> videos)
    : classes_(std::move(classes)), imu_(std::move(imu)), videos_(std::move(videos)) {
    for (const auto& v : videos_) {
        if (!classes_.count(v.class_id)) {
            throw DataLoadFailed("video '" + v.id + "' references unknown class id " +
                                 std::to_string(v.class_id));
        }
    }
}

const std::string& DatasetManifest::class_name(int id) const {
    auto it = classes_.find(id);
    if (it == classes_.end()) {
        throw DataLoadFailed("unknown class id " + std::to_string(id));
    }
    return it->second;
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataLoadFailed("cannot open manifest '" + path.string() + "'");
    }
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw DataLoadFailed("manifest is not valid JSON: " + std::string(e.what()));
    }
    const auto base = path.parent_path();
    auto resolve = [&base](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    try {
        std::map<int, std::string> classes;
        for (const auto& c : doc.at("classes")) {
            classes[c.at("id").get<int>()] = c.at("name").get<std::string>();
        }
        std::vector<ImuEntry> imu;
        for (const auto& item : doc.at("imu")) {
            ImuEntry e;
            e.path = resolve(item.at("path").get<std::string>());
            e.provenance = provenance_from_string(item.at("provenance").get<std::string>());
            e.subject = item.value("subject", e.path.stem().string());
            e.source = item.value("source", std::string());
            e.split = item.value("split", std::string("train"));
            if (e.split != "train" && e.split != "test") {
                throw DataLoadFailed("imu split must be 'train' or 'test'");
            }
            imu.push_back(std::move(e));
        }
        std::vector<VideoEntry> videos;
        for (const auto& item : doc.value("videos", ordered_json::array())) {
            VideoEntry v;
            v.flow_path = resolve(item.at("flow").get<std::string>());
            v.pose_path = resolve(item.at("pose").get<std::string>());
            v.class_id = item.at("class").get<int>();
            v.id = item.value("id", v.flow_path.stem().string());
            videos.push_back(std::move(v));
        }
        for (const auto& e : imu) {
            if (!std::filesystem::exists(e.path)) {
                throw DataLoadFailed("missing IMU file '" + e.path.string() + "'");
            }
        }
        for (const auto& v : videos) {
            if (!std::filesystem::exists(v.flow_path)) {
                throw DataLoadFailed("missing flow file '" + v.flow_path.string() + "'");
            }
            if (!std::filesystem::exists(v.pose_path)) {
                throw DataLoadFailed("missing pose file '" + v.pose_path.string() + "'");
            }
        }
        return DatasetManifest(std::move(classes), std::move(imu), std::move(videos));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw DataLoadFailed("manifest schema error: " + std::string(e.what()));
    }
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    ordered_json doc;
    doc["classes"] = ordered_json::array();
    for (const auto& [id, name] : manifest.classes()) {
        doc["classes"].push_back({{"id", id}, {"name", name}});
    }
    doc["imu"] = ordered_json::array();
    const auto base = path.parent_path();
    auto relativize = [&base](const std::filesystem::path& p) {
        const auto rel = p.lexically_relative(base);
        return rel.empty() || rel.native().starts_with("..") ? p.string() : rel.string();
    };
    for (const auto& e : manifest.imu()) {
        ordered_json item;
        item["path"] = relativize(e.path);
        item["provenance"] = to_string(e.provenance);
        item["subject"] = e.subject;
        if (!e.source.empty()) item["source"] = e.source;
        item["split"] = e.split;
        doc["imu"].push_back(std::move(item));
    }
    doc["videos"] = ordered_json::array();
    for (const auto& v : manifest.videos()) {
        ordered_json item;
        item["flow"] = relativize(v.flow_path);
        item["pose"] = relativize(v.pose_path);
        item["class"] = v.class_id;
        item["id"] = v.id;
        doc["videos"].push_back(std::move(item));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataLoadFailed("cannot open '" + path.string() + "' for writing");
    }
    out << doc.dump(2) << '\n';
}

}  // namespace msihar
