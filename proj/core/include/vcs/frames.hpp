#pragma once

#include <vector>

#include "vcs/geometry.hpp"
#include "vcs/splines.hpp"

namespace vcs {

inline constexpr double kDefaultTransportStep = 1e-3;

/// Parallel-transported frames sampled on s_k = k h along a centerline.
class FrameField {
 public:
  FrameField(SplineCurve3 curve, double step, std::vector<double> params, std::vector<Frame> frames);

  [[nodiscard]] const SplineCurve3& curve() const noexcept { return curve_; }
  [[nodiscard]] double step() const noexcept { return step_; }
  [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
  [[nodiscard]] const std::vector<Frame>& frames() const noexcept { return frames_; }

 private:
  SplineCurve3 curve_;
  double step_;
  std::vector<double> params_;
  std::vector<Frame> frames_;
};

/// Rotates `frame` so its tangent becomes `to` (unit), by the angle between
/// the tangents about their cross product; unchanged when they are parallel.
/// The result is re-orthonormalized against `to`.
[[nodiscard]] Frame transport_step(const Frame& frame, const Vec3& to);

/// Forward-Euler parallel transport of v1_0 along the curve, step h in (0, 1e-2].
/// v1_0 is normalized and projected onto the normal plane of c'(0); a vector more
/// than ~5.7 degrees out of that plane (|v1.t| > 0.1) is rejected.
[[nodiscard]] FrameField parallel_transport(const SplineCurve3& curve, const Vec3& v1_0,
                                            double step = kDefaultTransportStep);

/// Frame at tau: the stored frame at the grid sample <= tau advanced by one
/// extra rotation step onto the exact tangent at tau.
[[nodiscard]] Frame frame_at(const FrameField& field, double tau);

}  // namespace vcs
