#pragma once

#include <cstdint>
#include <vector>

#include "vcs/atlas.hpp"
#include "vcs/coords.hpp"
#include "vcs/mesh.hpp"

namespace vcs {

enum class CenterlineKind { line, arc, helix, aorta };

/// Analytic centerline. Line, arc and aorta start at the origin heading +z
/// and bend toward +x; the helix winds about the z axis starting at (r, 0, 0).
struct CenterlineSpec {
  CenterlineKind kind = CenterlineKind::line;
  double length = 100.0;         // line
  double arc_radius = 30.0;      // arc
  double arc_angle = 1.5707963267948966;
  double helix_radius = 10.0;    // helix about the z axis
  double helix_pitch = 20.0;     // rise per turn
  double helix_turns = 2.0;
  double ascending = 50.0;       // aorta: straight leg, semicircular arch, straight leg
  double arch_radius = 30.0;
  double descending = 120.0;
};

enum class RadiusTermKind { sinusoidal, valsalva };

/// sinusoidal: a sin(2 pi m_tau tau) cos(m_theta theta)
/// valsalva:   a exp(-((tau - center) / width)^2) (1 + cos(3 theta)) / 2
struct RadiusTerm {
  RadiusTermKind kind = RadiusTermKind::sinusoidal;
  double amplitude = 0.0;
  double m_tau = 1.0;
  double m_theta = 1.0;
  double center = 0.1;
  double width = 0.05;
};

struct SyntheticSpec {
  CenterlineSpec centerline;
  double base_radius = 10.0;
  std::vector<RadiusTerm> terms;
  int n_tau = 200;
  int n_theta = 64;
  double noise = 0.0;        // standard deviation of radial noise, mm
  std::uint64_t seed = 1;
  double frame_angle = 0.0;  // rotation of v1 about t(0) from the reference direction
};

/// Ground truth for a synthetic vessel: arc-length parametrized centerline,
/// exact parallel-transport frames, analytic radius.
class SyntheticVessel {
 public:
  /// Throws spec error when the radius is not positive or reaches the
  /// smallest radius of curvature of the centerline.
  explicit SyntheticVessel(SyntheticSpec spec);

  [[nodiscard]] const SyntheticSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] double min_curvature_radius() const noexcept;

  [[nodiscard]] Vec3 centerline(double tau) const;
  [[nodiscard]] Frame frame(double tau) const;
  [[nodiscard]] double curvature(double tau) const;
  [[nodiscard]] double radius(double tau, double theta) const;
  [[nodiscard]] Vec3 point(double tau, double theta, double rho) const;
  [[nodiscard]] Vec3 surface_point(double tau, double theta) const {
    return point(tau, theta, radius(tau, theta));
  }

  /// Closest centerline point (exact for line, arc and aorta) and the
  /// resulting coordinates with the same flag conventions as to_vcs.
  [[nodiscard]] VesselCoordinates closest(const Vec3& x) const;

  /// Wall mesh on the spec's (n_tau, n_theta) grid, same layout as tessellate().
  [[nodiscard]] TriangleMesh mesh() const;
  /// Exact (tau, theta, rho) of each vertex of mesh(), noise included.
  [[nodiscard]] std::vector<VesselCoordinates> vertex_coordinates() const;

  /// Densely sampled centerline points.
  [[nodiscard]] std::vector<Vec3> centerline_samples(int n) const;

 private:
  [[nodiscard]] double closest_parameter(const Vec3& x) const;
  [[nodiscard]] double max_radius_estimate() const;

  SyntheticSpec spec_;
  double length_;
};

[[nodiscard]] const char* to_string(CenterlineKind kind) noexcept;
[[nodiscard]] CenterlineKind parse_centerline_kind(const std::string& name);

/// Poiseuille-like scalar u_max (1 - rho_n^2) at the lumen points of a
/// regular lattice with the given spacing (points beyond the end planes skipped).
/// A positive exterior_band keeps lattice points up to that many spacings
/// outside the wall, carrying the same (negative) analytic continuation, so
/// interpolation at the wall is not a one-sided extrapolation.
[[nodiscard]] ScatteredField poiseuille_field(const SyntheticVessel& vessel, double u_max,
                                              double spacing, double exterior_band = 0.0);

}  // namespace vcs
