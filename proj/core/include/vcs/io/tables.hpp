#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/atlas.hpp"
#include "vcs/geometry.hpp"

namespace vcs::io {

/// Numeric CSV table with a header row. Lines starting with '#' are comments;
/// "# key=value" comments are kept as metadata.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> metadata;

  /// Column position, or -1.
  [[nodiscard]] int find(std::string_view name) const;
  /// Column position; input error naming the column when absent.
  [[nodiscard]] std::size_t require(std::string_view name) const;
};

[[nodiscard]] Table parse_csv(std::string_view text);
[[nodiscard]] std::string format_csv(const Table& table);
[[nodiscard]] Table read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Table& table);

/// Shortest round-trip decimal form.
[[nodiscard]] std::string format_double(double v);

/// Points from columns x, y, z.
[[nodiscard]] std::vector<Vec3> table_points(const Table& table);

/// x, y, z plus every other column as a component.
[[nodiscard]] ScatteredField table_field(const Table& table, std::string name = "custom");

/// Legacy VTK (ASCII) point data: POINTS followed by POINT_DATA with SCALARS
/// or VECTORS blocks. Picks the array named `array` or the first one.
[[nodiscard]] ScatteredField parse_vtk(std::string_view text, std::string_view array = {});

/// CSV (.csv) or legacy VTK (.vtk) by extension.
[[nodiscard]] ScatteredField read_field(const std::filesystem::path& path, std::string_view array = {});

/// Sampled field as CSV: tau, theta, rho_n, x, y, z, value columns; grid
/// layout is stored in metadata comments so the file can be read back.
[[nodiscard]] Table sampled_field_table(const SampledField& field, const std::vector<Vec3>& positions);
[[nodiscard]] SampledField table_sampled_field(const Table& table);

}  // namespace vcs::io
