#pragma once

#include <vector>

#include "vcs/frames.hpp"
#include "vcs/geometry.hpp"
#include "vcs/splines.hpp"

namespace vcs {

/// (tau, theta, rho) of a point relative to a centerline and its frames.
struct VesselCoordinates {
  double tau = 0.0;    // [0, 1]
  double theta = 0.0;  // [0, 2 pi)
  double rho = 0.0;    // mm
  bool valid = true;       // rho below the local curvature radius
  bool degenerate = false; // point on the centerline; theta set to 0
  bool boundary = false;   // closest point clamped to a curve end, point beyond the cut plane
};

/// Centerline plus transported frames; everything a coordinate query needs.
class VcsContext {
 public:
  static constexpr int kCoarseSamples = 128;

  explicit VcsContext(FrameField frames);
  VcsContext(const SplineCurve3& curve, const Vec3& v1_0, double step = kDefaultTransportStep);

  [[nodiscard]] const SplineCurve3& curve() const noexcept { return frames_.curve(); }
  [[nodiscard]] const FrameField& frames() const noexcept { return frames_; }
  [[nodiscard]] const Vec3& v1_0() const noexcept { return frames_.frames().front().v1; }
  [[nodiscard]] const std::vector<Vec3>& coarse_samples() const noexcept { return coarse_; }
  [[nodiscard]] static double coarse_parameter(int i) noexcept {
    return static_cast<double>(i) / (kCoarseSamples - 1);
  }

 private:
  FrameField frames_;
  std::vector<Vec3> coarse_;
};

/// Cartesian -> vessel coordinates. tau is the global minimizer of ||x - c(t)||:
/// coarse sampling, Newton refinement of c'(t).(c(t) - x) = 0 with bisection
/// safeguard in every local basin, smallest distance wins (ties -> smallest tau).
[[nodiscard]] VesselCoordinates to_vcs(const VcsContext& ctx, const Vec3& x);

/// x = c(tau) + rho (v1 cos theta + v2 sin theta).
[[nodiscard]] Vec3 from_vcs(const VcsContext& ctx, double tau, double theta, double rho);
[[nodiscard]] inline Vec3 from_vcs(const VcsContext& ctx, const VesselCoordinates& c) {
  return from_vcs(ctx, c.tau, c.theta, c.rho);
}

/// rho / rho_w(tau, theta).
[[nodiscard]] double normalize_rho(const VesselCoordinates& c, const BivariateSpline& wall);

/// True when the sampled distance profile has a single basin and rho kappa < 1.
[[nodiscard]] bool validity_region(const VcsContext& ctx, const Vec3& x);

/// Wraps an angle into [0, 2 pi).
[[nodiscard]] double wrap_angle(double theta) noexcept;

}  // namespace vcs
