#pragma once

#include <string>

#include "pdmm/types.hpp"

namespace pdmm {

/// Reads a binary (P5) or ASCII (P2) PGM image; pixel values are scaled to
/// [0,1] by the file's max value (255 or 65535, 16-bit samples big-endian).
/// Throws std::runtime_error on malformed headers or truncated data.
RMat read_pgm(const std::string& path);

/// Writes a binary (P5) PGM; values are clamped to [0,1] and quantized to
/// max_value levels. Writing then reading is lossless for images already on
/// the 8-bit grid.
void write_pgm(const std::string& path, const RMat& image, int max_value = 255);

}  // namespace pdmm
