#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "forge/finetune_kernels.hpp"

namespace forge {

// SVCW file, little-endian throughout:
//   offset 0   char[4]  "SVCW"
//          4   u32      version (1)
//          8   u32      kind (0 = matrix, 1 = LoRA adapter)
//         12   u32      rows  (m)
//         16   u32      cols  (l)
//         20   u32      rank  (r; 0 for a plain matrix)
//         24   f32[]    matrix: m*l row-major; adapter: A (m*r) then B (r*l), row-major

enum class SvcwKind : std::uint32_t { matrix = 0, adapter = 1 };

struct SvcwFile {
    SvcwKind kind = SvcwKind::matrix;
    Matrix matrix;
    LoraAdapter adapter;
};

std::string encode_svcw(const Matrix& m);
std::string encode_svcw(const LoraAdapter& adapter);
SvcwFile decode_svcw(const std::string& bytes);

void write_svcw(const std::filesystem::path& path, const Matrix& m);
void write_svcw(const std::filesystem::path& path, const LoraAdapter& adapter);
SvcwFile read_svcw(const std::filesystem::path& path);

/// Rounds every entry through float32, matching what an SVCW round trip stores.
Matrix to_float32(const Matrix& m);

/// Writes SVCW inputs plus fixtures.json with the expected kernel outputs.
/// Expected values are computed from the float32-rounded inputs.
void export_kernel_fixtures(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace forge
