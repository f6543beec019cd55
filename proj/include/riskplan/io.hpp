#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "riskplan/raster.hpp"
#include "riskplan/scene.hpp"

namespace riskplan::io {

namespace fs = std::filesystem;

using Bytes = std::vector<std::uint8_t>;

Bytes read_file(const fs::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const fs::path& path, const Bytes& data);
void write_text_atomic(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

// PNG codecs. Errors are IoError.

/// 8-bit RGB. Decoding accepts any PNG color type and converts to RGB.
Bytes encode_rgb_png(const ColorImage& image);
ColorImage decode_rgb_png(const Bytes& png);

/// 8-bit gray, 255 = true. Decoding treats values >= 128 as true.
Bytes encode_mask_png(const BinaryMask& mask);
BinaryMask decode_mask_png(const Bytes& png);

/// Indexed-color PNG whose palette index is the class id. The palette holds
/// the taxonomy's display colors.
Bytes encode_label_png(const LabelGrid& grid);
/// Requires a palette PNG whose indices are valid ids of `taxonomy`.
LabelGrid decode_label_png(const Bytes& png, std::shared_ptr<const ClassTaxonomy> taxonomy);

void write_rgb_png(const fs::path& path, const ColorImage& image);
ColorImage read_rgb_png(const fs::path& path);
void write_mask_png(const fs::path& path, const BinaryMask& mask);
BinaryMask read_mask_png(const fs::path& path);
void write_label_png(const fs::path& path, const LabelGrid& grid);
LabelGrid read_label_png(const fs::path& path, std::shared_ptr<const ClassTaxonomy> taxonomy);

}  // namespace riskplan::io
