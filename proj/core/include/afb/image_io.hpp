#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "afb/image.hpp"

namespace afb {

// Decodes an 8-bit RGB PNG or a binary PPM (P6, maxval 255).
// Throws UnsupportedFormat for anything else (grayscale, palette, alpha,
// 16-bit, unknown magic) and MalformedFile for undecodable input.
RgbImage decode_image(const std::vector<std::uint8_t>& bytes);

// Convenience wrapper: reads the file and decodes it.
RgbImage load_image(const std::filesystem::path& path);

// Encodes as an 8-bit RGB PNG. Output bytes are deterministic for a given
// image (fixed compression settings, no ancillary chunks).
std::vector<std::uint8_t> encode_png(const RgbImage& img);

// Encodes as a binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);

void save_png(const RgbImage& img, const std::filesystem::path& path);

}  // namespace afb
