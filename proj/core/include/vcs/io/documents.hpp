#pragma once

// JSON documents for models, centerlines, cohorts, atlases and synthetic
// vessel descriptions. Floats are written in shortest round-trip form, so
// read(write(x)) reproduces x bit for bit.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/atlas.hpp"
#include "vcs/cohort.hpp"
#include "vcs/error.hpp"
#include "vcs/model.hpp"
#include "vcs/synthetic.hpp"

namespace vcs::io {

inline constexpr int kSchemaVersion = 1;

[[nodiscard]] std::string_view tool_version() noexcept;

struct Provenance {
  std::string source_mesh_hash;  // FNV-1a of the input mesh file, hex
  std::string tool_version{vcs::io::tool_version()};
};

struct ModelDocument {
  VesselModel model;
  Provenance provenance;
};

struct CenterlineDocument {
  SplineCurve3 curve;
  Vec3 v1_0;
  double voxel = 0.5;
  Vec3 pA = Vec3::Zero();
  Vec3 pB = Vec3::Zero();
  double min_clearance = 0.0;
  Provenance provenance;
};

/// Documents are parsed strictly (unknown keys rejected) unless strict is false.
/// A version newer than kSchemaVersion is always rejected.
[[nodiscard]] std::string dump_model(const ModelDocument& doc);
[[nodiscard]] ModelDocument load_model(std::string_view json, bool strict = true);
void write_model(const std::filesystem::path& path, const ModelDocument& doc);
[[nodiscard]] ModelDocument read_model(const std::filesystem::path& path, bool strict = true);

[[nodiscard]] std::string dump_centerline(const CenterlineDocument& doc);
[[nodiscard]] CenterlineDocument load_centerline(std::string_view json, bool strict = true);

[[nodiscard]] std::string dump_cohort(const CohortModel& cohort);
[[nodiscard]] CohortModel load_cohort(std::string_view json, bool strict = true);

[[nodiscard]] std::string dump_atlas(const FieldAtlas& atlas);
[[nodiscard]] FieldAtlas load_atlas(std::string_view json, bool strict = true);

[[nodiscard]] std::string dump_transforms(const std::vector<std::string>& ids,
                                          const Coregistration& result);

[[nodiscard]] std::string dump_synthetic_spec(const SyntheticSpec& spec);
[[nodiscard]] SyntheticSpec load_synthetic_spec(std::string_view json);
/// Spec plus the exact (tau, theta, rho) of every generated vertex.
[[nodiscard]] std::string dump_oracle(const SyntheticVessel& vessel);

[[nodiscard]] std::string dump_residual_report(const ResidualReport& report, const ModelDims& dims);

/// {"error": {"code": ..., "message": ..., "exit_code": ...}}
[[nodiscard]] std::string error_json(std::string_view code, std::string_view message, int exit_code);

}  // namespace vcs::io
