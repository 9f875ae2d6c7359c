#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "vcs/mesh.hpp"

namespace vcs::io {

enum class MeshFormat { stl_binary, stl_ascii, obj };

/// Reads STL (binary or ASCII, detected from content) or OBJ (by extension),
/// then welds vertices within `weld_tolerance` mm.
[[nodiscard]] TriangleMesh read_mesh(const std::filesystem::path& path, double weld_tolerance = 1e-6);

/// Format from the extension: .stl writes binary, .obj writes OBJ.
void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);
void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);

/// In-memory parsers; `bytes` is the whole file. Results are not welded.
[[nodiscard]] TriangleMesh parse_stl(std::string_view bytes);
[[nodiscard]] TriangleMesh parse_obj(std::string_view bytes);
[[nodiscard]] std::string format_mesh(const TriangleMesh& mesh, MeshFormat format);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);
/// Whole file as bytes; input error when it cannot be opened.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace vcs::io
