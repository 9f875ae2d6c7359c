#include "vcs/io/tables.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "vcs/error.hpp"
#include "vcs/io/mesh_io.hpp"

namespace vcs::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view tok, std::size_t offset) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
    fail(ErrorCode::parse, "invalid number '" + std::string(tok) + "' at byte " + std::to_string(offset));
  return v;
}

std::vector<std::string> column_names(const std::string& stem, int components) {
  if (components == 1) return {stem};
  if (components == 3) return {stem + "_x", stem + "_y", stem + "_z"};
  std::vector<std::string> out;
  for (int c = 0; c < components; ++c) out.push_back(stem + "_" + std::to_string(c));
  return out;
}

}  // namespace

int Table::find(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::size_t Table::require(std::string_view name) const {
  const int i = find(name);
  if (i < 0) fail(ErrorCode::input, "table has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(i);
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

Table parse_csv(std::string_view text) {
  Table t;
  std::size_t start = 0;
  bool header = false;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    if (!line.empty() && line.front() == '#') {
      const auto body = trim(line.substr(1));
      if (const auto eq = body.find('='); eq != std::string_view::npos)
        t.metadata[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
    } else if (!line.empty()) {
      const auto cells = split(line, ',');
      if (!header) {
        for (auto c : cells) t.columns.emplace_back(c);
        header = true;
      } else {
        if (cells.size() != t.columns.size())
          fail(ErrorCode::parse, "row with " + std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(t.columns.size()) + ", at byte " + std::to_string(start));
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells) row.push_back(to_double(c, static_cast<std::size_t>(c.data() - text.data())));
        t.rows.push_back(std::move(row));
      }
    }
    start = end + 1;
  }
  if (!header) fail(ErrorCode::input, "CSV has no header row");
  return t;
}

std::string format_csv(const Table& table) {
  std::string out;
  for (const auto& [k, v] : table.metadata) out += "# " + k + "=" + v + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += "\n";
  }
  return out;
}

Table read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(read_file(path));
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_csv(const std::filesystem::path& path, const Table& table) { write_file(path, format_csv(table)); }

std::vector<Vec3> table_points(const Table& table) {
  const auto x = table.require("x");
  const auto y = table.require("y");
  const auto z = table.require("z");
  std::vector<Vec3> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) out.emplace_back(r[x], r[y], r[z]);
  return out;
}

ScatteredField table_field(const Table& table, std::string name) {
  ScatteredField f;
  f.name = std::move(name);
  f.points = table_points(table);
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    if (table.columns[c] != "x" && table.columns[c] != "y" && table.columns[c] != "z") value_cols.push_back(c);
  if (value_cols.empty()) fail(ErrorCode::input, "field table has no value columns");
  f.components = static_cast<int>(value_cols.size());
  for (const auto& r : table.rows)
    for (auto c : value_cols) {
      if (!std::isfinite(r[c])) fail(ErrorCode::input, "field table contains non-finite values");
      f.values.push_back(r[c]);
    }
  if (auto it = table.metadata.find("units"); it != table.metadata.end()) f.units = it->second;
  if (auto it = table.metadata.find("name"); it != table.metadata.end()) f.name = it->second;
  if (f.points.empty()) fail(ErrorCode::input, "field table has no rows");
  return f;
}

ScatteredField parse_vtk(std::string_view text, std::string_view array) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Vec3> points;
  ScatteredField chosen;
  bool have = false;
  const auto read_values = [&](std::size_t count) {
    std::vector<double> v(count);
    for (auto& x : v)
      if (!(in >> x)) fail(ErrorCode::parse, "truncated VTK data at byte " + std::to_string(static_cast<long>(in.tellg())));
    return v;
  };
  std::string word;
  std::size_t n_point_data = 0;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) fail(ErrorCode::parse, "missing VTK header at byte 0");
  std::getline(in, line);  // title
  std::getline(in, line);
  if (trim(line) != "ASCII") fail(ErrorCode::parse, "only ASCII legacy VTK is supported");
  while (in >> word) {
    if (word == "POINTS") {
      std::size_t n = 0;
      std::string type;
      in >> n >> type;
      const auto v = read_values(3 * n);
      points.resize(n);
      for (std::size_t i = 0; i < n; ++i) points[i] = {v[3 * i], v[3 * i + 1], v[3 * i + 2]};
    } else if (word == "POINT_DATA") {
      in >> n_point_data;
    } else if (word == "SCALARS" || word == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      int comps = word == "VECTORS" ? 3 : 1;
      if (word == "SCALARS") {
        std::getline(in, line);
        if (const auto t = trim(line); !t.empty()) comps = std::stoi(std::string(t));
        const auto pos = in.tellg();
        std::string lt;
        in >> lt;
        if (lt == "LOOKUP_TABLE") std::getline(in, line);
        else in.seekg(pos);
      }
      const auto v = read_values(n_point_data * static_cast<std::size_t>(comps));
      if (!have && (array.empty() || array == name)) {
        chosen.name = name;
        chosen.components = comps;
        chosen.values = v;
        have = true;
      }
    } else {
      std::getline(in, line);  // skip unsupported sections' header line
    }
  }
  if (points.empty()) fail(ErrorCode::input, "VTK file has no POINTS");
  if (!have) fail(ErrorCode::input, array.empty() ? "VTK file has no point data" : "VTK array '" + std::string(array) + "' not found");
  if (n_point_data != points.size()) fail(ErrorCode::parse, "POINT_DATA count differs from POINTS count");
  chosen.points = std::move(points);
  return chosen;
}

ScatteredField read_field(const std::filesystem::path& path, std::string_view array) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".vtk") return parse_vtk(read_file(path), array);
  if (ext == ".csv") return table_field(read_csv(path), path.stem().string());
  fail(ErrorCode::input, "unsupported field extension '" + ext + "' (expected .csv or .vtk)");
}

Table sampled_field_table(const SampledField& field, const std::vector<Vec3>& positions) {
  Table t;
  t.metadata["grid"] = std::to_string(field.grid.n_tau()) + "x" + std::to_string(field.grid.n_theta()) + "x" +
                       std::to_string(field.grid.n_rho());
  t.metadata["wall_only"] = field.wall_only ? "1" : "0";
  t.metadata["components"] = std::to_string(field.components);
  t.metadata["name"] = field.name;
  t.metadata["units"] = field.units;
  t.metadata["gaps"] = std::to_string(field.gaps);
  t.columns = {"node", "tau", "theta", "rho_n", "x", "y", "z"};
  for (auto& c : column_names("value", field.components)) t.columns.push_back(c);
  const auto nodes = field.node_indices();
  const auto nc = static_cast<std::size_t>(field.components);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto& g = field.grid.nodes()[nodes[n]];
    std::vector<double> row{static_cast<double>(nodes[n]), g.tau, g.theta, g.rho_n};
    const Vec3 p = n < positions.size() ? positions[n] : Vec3::Constant(std::nan(""));
    row.insert(row.end(), {p.x(), p.y(), p.z()});
    for (std::size_t c = 0; c < nc; ++c) row.push_back(field.values[n * nc + c]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

SampledField table_sampled_field(const Table& t) {
  const auto meta = [&](const char* key) -> const std::string& {
    const auto it = t.metadata.find(key);
    if (it == t.metadata.end()) fail(ErrorCode::input, std::string("sampled field has no '") + key + "' metadata");
    return it->second;
  };
  int nt = 0, nh = 0, nr = 0;
  if (std::sscanf(meta("grid").c_str(), "%dx%dx%d", &nt, &nh, &nr) != 3)
    fail(ErrorCode::parse, "invalid grid metadata '" + meta("grid") + "'");
  SampledField f;
  f.grid = MeasurementGrid(nt, nh, nr);
  f.wall_only = meta("wall_only") == "1";
  f.components = std::stoi(meta("components"));
  f.name = meta("name");
  if (auto it = t.metadata.find("units"); it != t.metadata.end()) f.units = it->second;
  if (auto it = t.metadata.find("gaps"); it != t.metadata.end()) f.gaps = std::stoul(it->second);
  const auto nodes = f.node_indices();
  if (t.rows.size() != nodes.size())
    fail(ErrorCode::layout, "sampled field has " + std::to_string(t.rows.size()) + " rows, grid needs " +
                                std::to_string(nodes.size()));
  std::vector<std::size_t> cols;
  for (const auto& c : column_names("value", f.components)) cols.push_back(t.require(c));
  const auto node_col = t.require("node");
  for (std::size_t n = 0; n < t.rows.size(); ++n) {
    if (static_cast<std::size_t>(t.rows[n][node_col]) != nodes[n])
      fail(ErrorCode::layout, "sampled field row " + std::to_string(n) + " is out of grid order");
    for (auto c : cols) f.values.push_back(t.rows[n][c]);
  }
  return f;
}

}  // namespace vcs::io
