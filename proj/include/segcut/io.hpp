#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace segcut::io {

/// Reads a whole file; throws DataError naming the path if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace segcut::io
