#include "msihar/flow_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace msihar {

namespace {

constexpr char kMagic[6] = {'M', 'S', 'I', 'F', '1', '\n'};

template <typename T>
T read_le(std::istream& in) {
    // Host is little-endian on every supported platform.
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void check_plane_values(const std::vector<float>& plane, bool normalized,
                        const char* name) {
    for (float x : plane) {
        if (!std::isfinite(x)) {
            throw NonFiniteValue(std::string("flow payload contains non-finite ") + name);
        }
        if (normalized && std::abs(x) > 1.0f) {
            throw FlowOutOfRange(std::string("normalized ") + name +
                                 " exceeds one-frame full-frame displacement");
        }
    }
}

}  // namespace

FlowSequence load_flow_sequence(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataLoadFailed("cannot open flow file '" + path.string() + "'");
    }
    char magic[6] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw MalformedHeader("missing MSIF1 magic in '" + path.string() + "'");
    }
    const auto height = read_le<std::uint32_t>(in);
    const auto width = read_le<std::uint32_t>(in);
    const auto frame_count = read_le<std::uint32_t>(in);
    const auto fps = read_le<double>(in);
    const auto normalized_byte = read_le<std::uint8_t>(in);
    if (!in) {
        throw MalformedHeader("truncated MSIF1 header in '" + path.string() + "'");
    }
    if (height < 1 || width < 1 || frame_count < 1) {
        throw MalformedHeader("MSIF1 header declares empty dimensions");
    }
    if (!(fps > 0.0) || !std::isfinite(fps)) {
        throw MalformedHeader("MSIF1 header declares non-positive fps");
    }
    if (normalized_byte > 1) {
        throw MalformedHeader("MSIF1 normalized flag must be 0 or 1");
    }
    const bool normalized = normalized_byte == 1;

    const std::size_t plane = static_cast<std::size_t>(height) * width;
    std::vector<FlowField> frames;
    frames.reserve(frame_count);
    for (std::uint32_t f = 0; f < frame_count; ++f) {
        std::vector<float> u(plane), v(plane);
        in.read(reinterpret_cast<char*>(u.data()),
                static_cast<std::streamsize>(plane * sizeof(float)));
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(plane * sizeof(float)));
        if (!in) {
            throw DimensionMismatch("payload shorter than 2*H*W*frames floats");
        }
        check_plane_values(u, normalized, "u");
        check_plane_values(v, normalized, "v");
        frames.emplace_back(static_cast<int>(height), static_cast<int>(width),
                            std::move(u), std::move(v), normalized);
    }
    in.peek();
    if (!in.eof()) {
        throw DimensionMismatch("payload longer than 2*H*W*frames floats");
    }
    return FlowSequence(std::move(frames), fps, path.stem().string());
}

void write_flow_sequence(const FlowSequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataLoadFailed("cannot open '" + path.string() + "' for writing");
    }
    out.write(kMagic, sizeof(kMagic));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(seq.height()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(seq.width()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(seq.frames().size()));
    write_le<double>(out, seq.fps());
    write_le<std::uint8_t>(out, seq.normalized() ? 1 : 0);
    for (const auto& frame : seq.frames()) {
        out.write(reinterpret_cast<const char*>(frame.u().data()),
                  static_cast<std::streamsize>(frame.u().size() * sizeof(float)));
        out.write(reinterpret_cast<const char*>(frame.v().data()),
                  static_cast<std::streamsize>(frame.v().size() * sizeof(float)));
    }
    if (!out) {
        throw DataLoadFailed("short write to '" + path.string() + "'");
    }
}

FlowSequence read_flow_text(std::istream& in, const std::string& source_id) {
    int height = 0, width = 0, frame_count = 0;
    double fps = 0.0;
    int normalized_flag = 0;
    if (!(in >> height >> width >> frame_count >> fps >> normalized_flag)) {
        throw MalformedHeader("text flow header must be 'H W frames fps normalized'");
    }
    if (height < 1 || width < 1 || frame_count < 1 || !(fps > 0.0)) {
        throw MalformedHeader("text flow header declares empty dimensions");
    }
    const bool normalized = normalized_flag != 0;
    const std::size_t plane = static_cast<std::size_t>(height) * width;
    std::vector<FlowField> frames;
    frames.reserve(frame_count);
    for (int f = 0; f < frame_count; ++f) {
        std::vector<float> u(plane), v(plane);
        for (auto& x : u) {
            if (!(in >> x)) throw DimensionMismatch("text flow payload too short");
        }
        for (auto& x : v) {
            if (!(in >> x)) throw DimensionMismatch("text flow payload too short");
        }
        check_plane_values(u, normalized, "u");
        check_plane_values(v, normalized, "v");
        frames.emplace_back(height, width, std::move(u), std::move(v), normalized);
    }
    return FlowSequence(std::move(frames), fps, source_id);
}

GrayFrame load_gray_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataLoadFailed("cannot open PGM file '" + path.string() + "'");
    }
    auto next_token = [&in]() -> std::string {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw MalformedHeader("truncated PGM header");
    };
    if (next_token() != "P5") {
        throw MalformedHeader("only binary 8-bit PGM (P5) is supported");
    }
    const int width = std::stoi(next_token());
    const int height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (width < 1 || height < 1 || maxval < 1 || maxval > 255) {
        throw MalformedHeader("PGM header out of range (8-bit only)");
    }
    in.get();  // single whitespace before the raster
    const std::size_t n = static_cast<std::size_t>(height) * width;
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (!in) {
        throw DimensionMismatch("PGM raster shorter than H*W bytes");
    }
    std::vector<double> intensities(n);
    const double scale = 1.0 / maxval;
    for (std::size_t i = 0; i < n; ++i) {
        intensities[i] = raw[i] * scale;
    }
    return GrayFrame(height, width, std::move(intensities));
}

}  // namespace msihar
