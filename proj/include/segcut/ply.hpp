#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "segcut/mesh.hpp"

namespace segcut {

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Parses PLY bytes (ASCII or binary little endian). `source` names the
/// input in error messages. Errors carry a "line N" or "byte N" location.
TriMesh parse_ply(std::string_view bytes, const std::string& source = "<memory>");
TriMesh load_ply(const std::filesystem::path& path);

/// Positions are written as float when every coordinate is exactly
/// representable, otherwise as double. Colors are quantized to 8 bits.
std::string serialize_ply(const TriMesh& mesh, PlyFormat format = PlyFormat::BinaryLittleEndian);
void save_ply(const TriMesh& mesh, const std::filesystem::path& path,
              PlyFormat format = PlyFormat::BinaryLittleEndian);

}  // namespace segcut
