#include "vcs/coords.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vcs/error.hpp"

namespace vcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegenerateRho = 1e-12;

struct Candidate {
  double t;
  double dist2;
};

// g(t) = c'(t).(c(t) - x), half the derivative of the squared distance.
double stationarity(const SplineCurve3& c, const Vec3& x, double t) {
  return c.evaluate(t, 1).dot(c.evaluate(t, 0) - x);
}

// Safeguarded Newton on g over [a, b] with g(a) < 0 < g(b).
double refine_root(const SplineCurve3& c, const Vec3& x, double a, double b) {
  double t = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const Vec3 p = c.evaluate(t, 0) - x;
    const Vec3 d1 = c.evaluate(t, 1);
    const Vec3 d2 = c.evaluate(t, 2);
    const double g = d1.dot(p);
    const double dg = d2.dot(p) + d1.squaredNorm();
    if (g < 0) a = t;
    else if (g > 0) b = t;
    else return t;
    double next = t - g / dg;
    if (!(dg > 0) || !(next > a && next < b)) next = 0.5 * (a + b);  // bisection fallback
    if (std::abs(next - t) <= 1e-16 || b - a <= 1e-16) return next;
    t = next;
  }
  return t;
}

void refine_basin(const VcsContext& ctx, const Vec3& x, double a, double b,
                  std::vector<Candidate>& out) {
  const auto& c = ctx.curve();
  double ga = stationarity(c, x, a);
  double gb = stationarity(c, x, b);
  if (!(ga < 0 && gb > 0)) {
    // look for a - to + sign change on a finer subgrid of the basin
    constexpr int kSub = 32;
    double prev_t = a;
    double prev_g = ga;
    bool found = false;
    for (int s = 1; s <= kSub && !found; ++s) {
      const double t = a + (b - a) * s / kSub;
      const double gt = stationarity(c, x, t);
      if (prev_g < 0 && gt > 0) {
        a = prev_t;
        b = t;
        found = true;
      } else if (gt == 0.0) {
        out.push_back({t, (c.position(t) - x).squaredNorm()});
        return;
      }
      prev_t = t;
      prev_g = gt;
    }
    if (!found) return;  // monotone basin: its minimum is an end, covered elsewhere
  }
  const double t = refine_root(c, x, a, b);
  out.push_back({t, (c.position(t) - x).squaredNorm()});
}

std::vector<double> coarse_profile(const VcsContext& ctx, const Vec3& x) {
  const auto& samples = ctx.coarse_samples();
  std::vector<double> d(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) d[i] = (samples[i] - x).squaredNorm();
  return d;
}

}  // namespace

double wrap_angle(double theta) noexcept {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

VcsContext::VcsContext(FrameField frames) : frames_(std::move(frames)) {
  coarse_.reserve(kCoarseSamples);
  for (int i = 0; i < kCoarseSamples; ++i) coarse_.push_back(curve().position(coarse_parameter(i)));
}

VcsContext::VcsContext(const SplineCurve3& curve, const Vec3& v1_0, double step)
    : VcsContext(parallel_transport(curve, v1_0, step)) {}

VesselCoordinates to_vcs(const VcsContext& ctx, const Vec3& x) {
  if (!x.allFinite()) fail(ErrorCode::domain, "point has non-finite coordinates");
  const auto& c = ctx.curve();
  const auto d = coarse_profile(ctx, x);
  const int n = static_cast<int>(d.size());

  std::vector<Candidate> candidates{{0.0, (c.position(0.0) - x).squaredNorm()},
                                    {1.0, (c.position(1.0) - x).squaredNorm()}};
  for (int i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || d[static_cast<std::size_t>(i)] <= d[static_cast<std::size_t>(i - 1)];
    const bool right_ok = i == n - 1 || d[static_cast<std::size_t>(i)] <= d[static_cast<std::size_t>(i + 1)];
    if (!left_ok || !right_ok) continue;
    const double a = VcsContext::coarse_parameter(std::max(i - 1, 0));
    const double b = VcsContext::coarse_parameter(std::min(i + 1, n - 1));
    refine_basin(ctx, x, a, b, candidates);
  }
  const auto best = std::min_element(candidates.begin(), candidates.end(),
                                     [](const Candidate& p, const Candidate& q) {
                                       const double tol = 1e-12 * std::max(p.dist2, q.dist2);
                                       if (std::abs(p.dist2 - q.dist2) <= tol) return p.t < q.t;
                                       return p.dist2 < q.dist2;
                                     });

  VesselCoordinates out;
  out.tau = std::clamp(best->t, 0.0, 1.0);
  const Vec3 offset = x - c.position(out.tau);
  out.rho = offset.norm();
  const Frame f = frame_at(ctx.frames(), out.tau);
  if (out.rho < kDegenerateRho) {
    out.degenerate = true;
    out.theta = 0.0;
  } else {
    out.theta = wrap_angle(std::atan2(offset.dot(f.v2), offset.dot(f.v1)));
    if ((out.tau == 0.0 || out.tau == 1.0) && std::abs(offset.dot(f.t)) > 1e-7 * out.rho)
      out.boundary = true;
  }
  out.valid = out.rho * c.curvature(out.tau) < 1.0;
  return out;
}

Vec3 from_vcs(const VcsContext& ctx, double tau, double theta, double rho) {
  if (!std::isfinite(tau) || tau < -1e-12 || tau > 1.0 + 1e-12)
    fail(ErrorCode::domain, "tau " + std::to_string(tau) + " outside [0, 1]");
  tau = std::clamp(tau, 0.0, 1.0);
  const Frame f = frame_at(ctx.frames(), tau);
  return ctx.curve().position(tau) + rho * (f.v1 * std::cos(theta) + f.v2 * std::sin(theta));
}

double normalize_rho(const VesselCoordinates& c, const BivariateSpline& wall) {
  const double rw = wall(c.tau, c.theta);
  if (!(rw > 0.0))
    fail(ErrorCode::model, "wall radius " + std::to_string(rw) + " is not positive at tau=" +
                               std::to_string(c.tau) + ", theta=" + std::to_string(c.theta));
  return c.rho / rw;
}

bool validity_region(const VcsContext& ctx, const Vec3& x) {
  const auto d = coarse_profile(ctx, x);
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::sqrt(v));
  const double eps = 1e-9 * std::max(scale, 1e-12);
  // unimodal: strictly decreasing, then strictly increasing (up to eps)
  std::size_t i = 0;
  while (i + 1 < d.size() && std::sqrt(d[i]) > std::sqrt(d[i + 1]) + eps) ++i;
  std::size_t j = i;
  while (j + 1 < d.size() && std::sqrt(d[j]) + eps < std::sqrt(d[j + 1])) ++j;
  if (j + 1 != d.size()) return false;
  const auto c = to_vcs(ctx, x);
  return c.rho * ctx.curve().curvature(c.tau) < 1.0;
}

}  // namespace vcs
