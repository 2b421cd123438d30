#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "siqa/raster.hpp"

namespace siqa {

// Decodes a raster file. PPM (P6) and PGM (P5) with 8-bit samples are the
// supported formats; anything else raises UnsupportedFormat.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_ppm(const RasterImage& img);
std::vector<std::uint8_t> encode_pgm(const RasterImage& img);
// Affine-free export: values are expected in [0, 1] and map to 0..255.
std::vector<std::uint8_t> encode_pgm(const Grid& map);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

RasterImage load_image(const std::filesystem::path& path);

}  // namespace siqa
