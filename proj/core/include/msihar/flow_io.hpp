#pragma once

#include <filesystem>
#include <istream>

#include "msihar/flow.hpp"
#include "msihar/types.hpp"

namespace msihar {

// MSIF1 flow container: 6 magic bytes "MSIF1\n", then little-endian
// uint32 height, uint32 width, uint32 frame_count, float64 fps and a
// single normalized byte (0/1), followed by frame-major float32 planes,
// u-plane then v-plane per frame. Normalized files with any |u| > 1 or
// |v| > 1 are rejected.
FlowSequence load_flow_sequence(const std::filesystem::path& path);
void write_flow_sequence(const FlowSequence& seq, const std::filesystem::path& path);

// Whitespace text variant used by tests and small fixtures:
// one header line "H W frames fps normalized", then per frame H*W u values
// followed by H*W v values.
FlowSequence read_flow_text(std::istream& in, const std::string& source_id);

// 8-bit binary PGM (P5) importer; intensities scaled to [0, 1].
GrayFrame load_gray_pgm(const std::filesystem::path& path);

}  // namespace msihar
