#pragma once

#include <filesystem>
#include <string_view>

#include "sketchiq/image.hpp"

namespace sketchiq {

// Loads 8-bit grayscale or 24-bit RGB images in PNG or binary PGM/PPM
// (P5/P6), sniffing the format from the file's magic bytes. RGB content is
// reduced to luminance. Other bit depths are rejected with a FormatError.
GrayImage load_image(const std::filesystem::path& path);

// Writes an 8-bit grayscale PNG; values are clamped to [0, 255] and rounded
// half to even. The file appears atomically (temp file + rename).
void save_png(const GrayImage& img, const std::filesystem::path& path);

// Atomic text-file write used by all result exporters.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace sketchiq
