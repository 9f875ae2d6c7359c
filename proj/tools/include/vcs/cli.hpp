#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vcs/centerline.hpp"
#include "vcs/io/documents.hpp"

namespace vcs::cli {

enum ExitCode : int { success = 0, usage = 1, input = 2, numerical = 3 };

/// Runs the `vcs` command line with args[0] being the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Exit code for a library error category.
[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

struct CenterlineSettings {
  double voxel = 0.5;
  int spans = 9;
  std::optional<Vec3> pA;  // defaults to the first boundary loop centroid
  std::optional<Vec3> pB;  // defaults to the second boundary loop centroid
  std::optional<Vec3> v1;  // defaults to the wall-centroid rule
};

/// Voxelize, A* path, spline fit and initial frame for one mesh.
[[nodiscard]] io::CenterlineDocument extract_centerline(const TriangleMesh& mesh,
                                                        const CenterlineSettings& settings);

/// Same curve geometry with a different span count: the curve is sampled on a
/// dense uniform parameter grid and refitted at those parameters.
[[nodiscard]] SplineCurve3 respan(const SplineCurve3& curve, int spans);

/// "a..b[:step]" or "a,b,c".
[[nodiscard]] std::vector<int> parse_int_range(const std::string& text);
/// "x,y,z"
[[nodiscard]] Vec3 parse_point(const std::string& text);
/// "64x32" or "64x32x8"
[[nodiscard]] std::vector<int> parse_dims(const std::string& text, std::size_t count);

}  // namespace vcs::cli
