#include "vcs/io/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "vcs/error.hpp"

namespace vcs::io {

namespace {

[[noreturn]] void parse_error(std::size_t offset, const std::string& what) {
  fail(ErrorCode::parse, what + " at byte " + std::to_string(offset));
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Whitespace tokenizer that remembers byte offsets.
class Tokens {
 public:
  explicit Tokens(std::string_view s) : s_(s) {}

  bool next(std::string_view& tok) {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) return false;
    start_ = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    tok = s_.substr(start_, pos_ - start_);
    return true;
  }
  std::string_view expect(const char* what) {
    std::string_view tok;
    if (!next(tok)) parse_error(s_.size(), std::string("unexpected end of file, expected ") + what);
    return tok;
  }
  double number() {
    const auto tok = expect("a number");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      parse_error(start_, "invalid number '" + std::string(tok) + "'");
    return v;
  }
  void keyword(std::string_view word) {
    const auto tok = expect(std::string(word).c_str());
    if (tok != word) parse_error(start_, "expected '" + std::string(word) + "', found '" + std::string(tok) + "'");
  }
  [[nodiscard]] std::size_t offset() const noexcept { return start_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
};

template <class T>
T read_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

template <class T>
void write_le(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(b, sizeof(T));
}

TriangleMesh parse_stl_binary(std::string_view bytes) {
  const auto count = read_le<std::uint32_t>(bytes.data() + 80);
  TriangleMesh mesh;
  mesh.vertices.reserve(3 * count);
  mesh.faces.reserve(count);
  for (std::uint32_t f = 0; f < count; ++f) {
    const std::size_t base = 84 + 50 * static_cast<std::size_t>(f);
    for (int v = 0; v < 3; ++v) {
      Vec3 p;
      for (int d = 0; d < 3; ++d) {
        const std::size_t at = base + 12 + 12 * static_cast<std::size_t>(v) + 4 * static_cast<std::size_t>(d);
        const float x = read_le<float>(bytes.data() + at);
        if (!std::isfinite(x)) parse_error(at, "non-finite coordinate");
        p[d] = x;
      }
      mesh.vertices.push_back(p);
    }
    const int i = static_cast<int>(3 * f);
    mesh.faces.push_back({i, i + 1, i + 2});
  }
  return mesh;
}

TriangleMesh parse_stl_ascii(std::string_view bytes) {
  Tokens tok(bytes);
  tok.keyword("solid");
  TriangleMesh mesh;
  std::string_view word;
  // skip the solid name up to the first facet
  while (true) {
    if (!tok.next(word)) parse_error(bytes.size(), "unexpected end of file in ASCII STL");
    if (word == "facet" || word == "endsolid") break;
  }
  while (word == "facet") {
    tok.keyword("normal");
    for (int d = 0; d < 3; ++d) (void)tok.number();
    tok.keyword("outer");
    tok.keyword("loop");
    const int first = static_cast<int>(mesh.vertices.size());
    for (int v = 0; v < 3; ++v) {
      tok.keyword("vertex");
      Vec3 p;
      for (int d = 0; d < 3; ++d) p[d] = tok.number();
      mesh.vertices.push_back(p);
    }
    tok.keyword("endloop");
    tok.keyword("endfacet");
    mesh.faces.push_back({first, first + 1, first + 2});
    word = tok.expect("'facet' or 'endsolid'");
  }
  if (word != "endsolid") parse_error(tok.offset(), "expected 'endsolid', found '" + std::string(word) + "'");
  return mesh;
}

int obj_index(std::string_view tok, std::size_t offset, std::size_t vertex_count) {
  const auto slash = tok.find('/');
  const auto head = tok.substr(0, slash);
  long idx = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0)
    parse_error(offset, "invalid face index '" + std::string(tok) + "'");
  const long n = static_cast<long>(vertex_count);
  const long resolved = idx > 0 ? idx - 1 : n + idx;
  if (resolved < 0 || resolved >= n) parse_error(offset, "face index " + std::to_string(idx) + " out of range");
  return static_cast<int>(resolved);
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

}  // namespace

TriangleMesh parse_stl(std::string_view bytes) {
  if (bytes.size() >= 84) {
    const auto count = read_le<std::uint32_t>(bytes.data() + 80);
    if (bytes.size() == 84 + 50 * static_cast<std::size_t>(count)) return parse_stl_binary(bytes);
  }
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && bytes.substr(first, 5) == "solid") return parse_stl_ascii(bytes);
  if (bytes.size() < 84) parse_error(bytes.size(), "file too short for binary STL");
  parse_error(80, "binary STL triangle count does not match the file size");
}

TriangleMesh parse_obj(std::string_view bytes) {
  TriangleMesh mesh;
  std::size_t line_start = 0;
  while (line_start < bytes.size()) {
    auto line_end = bytes.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = bytes.size();
    std::string_view line = bytes.substr(line_start, line_end - line_start);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Tokens tok(line);
    std::string_view word;
    if (tok.next(word)) {
      try {
        if (word == "v") {
          Vec3 p;
          for (int d = 0; d < 3; ++d) p[d] = tok.number();
          mesh.vertices.push_back(p);
        } else if (word == "f") {
          std::vector<int> poly;
          std::string_view t;
          while (tok.next(t)) poly.push_back(obj_index(t, tok.offset(), mesh.vertices.size()));
          if (poly.size() < 3) parse_error(tok.offset(), "face with fewer than 3 vertices");
          for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
        }
      } catch (const Error& e) {
        // re-anchor the line-relative offset to the file
        const std::string msg = e.what();
        const auto at = msg.rfind(" at byte ");
        const std::size_t rel = at == std::string::npos ? 0 : std::stoul(msg.substr(at + 9));
        fail(ErrorCode::parse, msg.substr(0, at) + " at byte " + std::to_string(line_start + rel));
      }
    }
    line_start = line_end + 1;
  }
  return mesh;
}

std::string format_mesh(const TriangleMesh& mesh, MeshFormat format) {
  std::string out;
  const auto normal = [&](const std::array<int, 3>& f) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    const Vec3 n = (b - a).cross(c - a);
    return n.norm() > 0 ? Vec3(n.normalized()) : Vec3(Vec3::Zero());
  };
  switch (format) {
    case MeshFormat::stl_binary: {
      out.assign(80, '\0');
      const std::string header = "binary STL";
      std::copy(header.begin(), header.end(), out.begin());
      write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.faces.size()));
      for (const auto& f : mesh.faces) {
        const Vec3 n = normal(f);
        for (int d = 0; d < 3; ++d) write_le<float>(out, static_cast<float>(n[d]));
        for (int v : f)
          for (int d = 0; d < 3; ++d)
            write_le<float>(out, static_cast<float>(mesh.vertices[static_cast<std::size_t>(v)][d]));
        write_le<std::uint16_t>(out, 0);
      }
      break;
    }
    case MeshFormat::stl_ascii: {
      out = "solid vessel\n";
      for (const auto& f : mesh.faces) {
        const Vec3 n = normal(f);
        out += "facet normal " + format_number(n.x()) + " " + format_number(n.y()) + " " + format_number(n.z()) +
               "\n outer loop\n";
        for (int v : f) {
          const Vec3& p = mesh.vertices[static_cast<std::size_t>(v)];
          out += "  vertex " + format_number(p.x()) + " " + format_number(p.y()) + " " + format_number(p.z()) + "\n";
        }
        out += " endloop\nendfacet\n";
      }
      out += "endsolid vessel\n";
      break;
    }
    case MeshFormat::obj: {
      for (const auto& p : mesh.vertices)
        out += "v " + format_number(p.x()) + " " + format_number(p.y()) + " " + format_number(p.z()) + "\n";
      for (const auto& f : mesh.faces)
        out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
      break;
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::input, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::input, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::input, "write to '" + path.string() + "' failed");
}

TriangleMesh read_mesh(const std::filesystem::path& path, double weld_tolerance) {
  const std::string bytes = read_file(path);
  const std::string ext = lower_extension(path);
  TriangleMesh mesh;
  if (ext == ".obj") mesh = parse_obj(bytes);
  else if (ext == ".stl") mesh = parse_stl(bytes);
  else fail(ErrorCode::input, "unsupported mesh extension '" + ext + "' (expected .stl or .obj)");
  if (mesh.faces.empty()) fail(ErrorCode::input, "mesh '" + path.string() + "' has no triangles");
  return weld(mesh, weld_tolerance);
}

void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  write_file(path, format_mesh(mesh, format));
}

void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".obj") write_mesh(mesh, path, MeshFormat::obj);
  else if (ext == ".stl") write_mesh(mesh, path, MeshFormat::stl_binary);
  else fail(ErrorCode::input, "unsupported mesh extension '" + ext + "' (expected .stl or .obj)");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vcs::io
