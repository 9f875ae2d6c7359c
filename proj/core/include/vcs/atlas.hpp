#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vcs/model.hpp"
#include "vcs/pca.hpp"

namespace vcs {

/// Node of the measurement lattice in (tau, theta, rho_n).
struct GridNode {
  double tau;
  double theta;
  double rho_n;
};

/// Regular lattice over [0,1] x [0,2pi) x [0,1]. With n_rho >= 2 the rho_n = 0
/// layer is collapsed to one node per tau and stored first; the remaining
/// layers rho_n = k / (n_rho - 1), k >= 1, follow with tau major and theta
/// minor. With n_rho = 1 only the wall layer rho_n = 1 exists.
class MeasurementGrid {
 public:
  MeasurementGrid(int n_tau, int n_theta, int n_rho);

  [[nodiscard]] int n_tau() const noexcept { return n_tau_; }
  [[nodiscard]] int n_theta() const noexcept { return n_theta_; }
  [[nodiscard]] int n_rho() const noexcept { return n_rho_; }
  [[nodiscard]] const std::vector<GridNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  /// Indices of the rho_n = 1 nodes, tau major.
  [[nodiscard]] std::vector<std::size_t> wall_subset() const;
  /// Node index of (tau_i, theta_j, rho_k); any j maps to the same node when k = 0.
  [[nodiscard]] std::size_t index(int i, int j, int k) const;

  friend bool operator==(const MeasurementGrid& a, const MeasurementGrid& b) {
    return a.n_tau_ == b.n_tau_ && a.n_theta_ == b.n_theta_ && a.n_rho_ == b.n_rho_;
  }

 private:
  int n_tau_;
  int n_theta_;
  int n_rho_;
  std::vector<GridNode> nodes_;
};

[[nodiscard]] MeasurementGrid build_grid(int n_tau, int n_theta, int n_rho);

/// Cartesian positions of the grid nodes for one vessel (index aligned).
[[nodiscard]] std::vector<Vec3> materialize(const MeasurementGrid& grid, const VesselModel& model);
[[nodiscard]] std::vector<Vec3> materialize(const MeasurementGrid& grid, const VesselModel& model,
                                            std::span<const std::size_t> subset);

/// Scalar or vector quantity at scattered points (values point major).
struct ScatteredField {
  std::vector<Vec3> points;
  std::vector<double> values;
  int components = 1;
  std::string name = "custom";
  std::string units;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// Field on a measurement grid. A wall-only field carries values for the
/// wall subset only.
struct SampledField {
  MeasurementGrid grid{1, 3, 1};
  bool wall_only = false;
  int components = 1;
  std::vector<double> values;  // node major, components minor
  std::string name = "custom";
  std::string units;
  std::size_t gaps = 0;        // nodes filled by the nearest-neighbour fallback

  [[nodiscard]] std::size_t node_count() const {
    return wall_only ? grid.wall_subset().size() : grid.size();
  }
  /// Grid node index of the n-th stored node.
  [[nodiscard]] std::vector<std::size_t> node_indices() const;
};

struct ResampleOptions {
  int neighbors = 8;
  double power = 2.0;
  double coincidence = 1e-9;    // mm
  double cutoff_factor = 4.0;   // times the median nearest-neighbour spacing
};

struct Resampled {
  std::vector<double> values;  // target major, components minor
  std::size_t gaps = 0;
  double cutoff = 0.0;
};

/// Inverse-distance weighting over the k nearest field points.
[[nodiscard]] Resampled resample(const ScatteredField& field, std::span<const Vec3> targets,
                                 const ResampleOptions& options = {});

/// Resamples `field` at the materialized grid of `model`.
[[nodiscard]] SampledField sample_field(const ScatteredField& field, const VesselModel& model,
                                        const MeasurementGrid& grid, bool wall_only = false,
                                        const ResampleOptions& options = {});

/// Euclidean norm per node of a vector field.
[[nodiscard]] SampledField magnitude(const SampledField& field);

struct FieldAtlas {
  MeasurementGrid grid{1, 3, 1};
  bool wall_only = false;
  int components = 1;
  std::string name;
  std::string units;
  PrincipalComponents pca;
};

[[nodiscard]] FieldAtlas field_pca(std::span<const SampledField> fields);

/// Nodes whose |value| (vector norm per node) is at least fraction * max.
[[nodiscard]] std::vector<std::size_t> threshold_region(const Eigen::VectorXd& values, int components,
                                                        double fraction = 0.8);

}  // namespace vcs
