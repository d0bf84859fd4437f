#pragma once

#include <string>
#include <vector>

#include "lczmap/report.hpp"

namespace lczmap {

// Minimal 8-bit truecolor PNG encoder (filter 0, one zlib-compressed IDAT).
std::vector<std::uint8_t> encode_png(const ImageRGB& img);
void write_png(const ImageRGB& img, const std::string& path);

}  // namespace lczmap
