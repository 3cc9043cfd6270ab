#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "forge/camera_raster.hpp"

namespace forge {

// rgb        binary PPM, P6, maxval 255
// masks      binary PGM, P5, maxval 65535, 16-bit big-endian samples
// depth      "DEPTHF32" + u32le width + u32le height + width*height f32le (row-major)

std::string encode_ppm(int width, int height, const std::vector<float>& rgb);
std::string encode_pgm16(int width, int height, const std::vector<std::uint16_t>& values);
std::string encode_depth(int width, int height, const std::vector<float>& depth);

struct Mask16 {
    int width = 0, height = 0;
    std::vector<std::uint16_t> values;
};

struct DepthImage {
    int width = 0, height = 0;
    std::vector<float> values;
};

struct Rgb8Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> values;
};

Mask16 decode_pgm16(const std::string& bytes);
DepthImage decode_depth(const std::string& bytes);
Rgb8Image decode_ppm(const std::string& bytes);

void write_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace forge
