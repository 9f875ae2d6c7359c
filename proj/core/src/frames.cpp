#include "vcs/frames.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vcs/error.hpp"

namespace vcs {

namespace {
constexpr double kParallelTangents = 1e-12;
// Largest |v1.t0| that is silently removed by projection (about 5.7 degrees off the normal plane).
constexpr double kOrthogonality = 0.1;
}  // namespace

FrameField::FrameField(SplineCurve3 curve, double step, std::vector<double> params,
                       std::vector<Frame> frames)
    : curve_(std::move(curve)), step_(step), params_(std::move(params)), frames_(std::move(frames)) {
  if (params_.size() != frames_.size() || params_.size() < 2)
    fail(ErrorCode::layout, "frame field needs matching parameter and frame lists");
}

Frame transport_step(const Frame& frame, const Vec3& to) {
  const Vec3 r = frame.t.cross(to);
  const double s = r.norm();
  Vec3 v1 = frame.v1;
  if (s >= kParallelTangents) v1 = rotate_about(v1, r / s, std::atan2(s, frame.t.dot(to)));
  v1 -= v1.dot(to) * to;
  v1.normalize();
  return {to, v1, to.cross(v1)};
}

FrameField parallel_transport(const SplineCurve3& curve, const Vec3& v1_0, double step) {
  if (!(step > 0.0 && step <= 1e-2))
    fail(ErrorCode::precondition, "transport step must lie in (0, 1e-2], got " + std::to_string(step));
  const Vec3 t0 = curve.unit_tangent(0.0);
  if (!(v1_0.norm() > 0.0)) fail(ErrorCode::precondition, "initial frame vector is zero");
  const Vec3 u = v1_0.normalized();
  if (std::abs(u.dot(t0)) > kOrthogonality)
    fail(ErrorCode::precondition, "initial frame vector is not orthogonal to the tangent at c(0)");
  const Vec3 v1 = (u - u.dot(t0) * t0).normalized();

  const auto n = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  std::vector<double> params(n + 1);
  std::vector<Frame> frames(n + 1);
  for (std::size_t k = 0; k <= n; ++k) params[k] = std::min(static_cast<double>(k) * step, 1.0);
  params[n] = 1.0;
  frames[0] = {t0, v1, t0.cross(v1)};
  for (std::size_t k = 1; k <= n; ++k) frames[k] = transport_step(frames[k - 1], curve.unit_tangent(params[k]));
  return FrameField(curve, step, std::move(params), std::move(frames));
}

Frame frame_at(const FrameField& field, double tau) {
  if (!std::isfinite(tau) || tau < -1e-12 || tau > 1.0 + 1e-12)
    fail(ErrorCode::domain, "frame parameter " + std::to_string(tau) + " outside [0, 1]");
  tau = std::clamp(tau, 0.0, 1.0);
  const auto& params = field.params();
  const std::size_t last = params.size() - 1;
  auto k = static_cast<std::size_t>(std::clamp(std::floor(tau / field.step()), 0.0, static_cast<double>(last)));
  while (k > 0 && params[k] > tau) --k;
  while (k < last && params[k + 1] <= tau) ++k;
  if (params[k] == tau) return field.frames()[k];
  return transport_step(field.frames()[k], field.curve().unit_tangent(tau));
}

}  // namespace vcs
