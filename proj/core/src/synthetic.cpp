#include "vcs/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "vcs/error.hpp"
#include "vcs/parallel.hpp"

namespace vcs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Transported frame of the planar (xz) kinds, turning angle phi toward +x.
Frame planar_frame(double phi) {
  Frame f;
  f.t = Vec3(std::sin(phi), 0.0, std::cos(phi));
  f.v1 = Vec3(std::cos(phi), 0.0, -std::sin(phi));
  f.v2 = Vec3::UnitY();
  return f;
}

struct Helix {
  double a;  // radius
  double b;  // rise per radian
  double w;  // speed, sqrt(a^2 + b^2)
};

Helix helix_of(const CenterlineSpec& c) {
  const double b = c.helix_pitch / kTwoPi;
  return {c.helix_radius, b, std::hypot(c.helix_radius, b)};
}

// Closest angle on the circle arc center + r(-cos phi, 0, sin phi), phi in [0, span].
double closest_on_arc(const Vec3& x, const Vec3& center, double r, double span) {
  const double px = center.x() - x.x();
  const double pz = x.z() - center.z();
  if (std::hypot(px, pz) < 1e-15) return 0.0;
  double phi = std::atan2(pz, px);
  if (phi < 0) phi += kTwoPi;
  if (phi <= span) return phi;
  const auto at = [&](double p) { return center + r * Vec3(-std::cos(p), 0.0, std::sin(p)); };
  return (at(0.0) - x).squaredNorm() <= (at(span) - x).squaredNorm() ? 0.0 : span;
}

}  // namespace

const char* to_string(CenterlineKind kind) noexcept {
  switch (kind) {
    case CenterlineKind::line: return "line";
    case CenterlineKind::arc: return "arc";
    case CenterlineKind::helix: return "helix";
    case CenterlineKind::aorta: return "aorta";
  }
  return "line";
}

CenterlineKind parse_centerline_kind(const std::string& name) {
  if (name == "line") return CenterlineKind::line;
  if (name == "arc") return CenterlineKind::arc;
  if (name == "helix") return CenterlineKind::helix;
  if (name == "aorta" || name == "aorta-like") return CenterlineKind::aorta;
  fail(ErrorCode::spec, "unknown centerline kind '" + name + "'");
}

SyntheticVessel::SyntheticVessel(SyntheticSpec spec) : spec_(std::move(spec)), length_(0.0) {
  const auto& c = spec_.centerline;
  switch (c.kind) {
    case CenterlineKind::line:
      if (!(c.length > 0)) fail(ErrorCode::spec, "line length must be positive");
      length_ = c.length;
      break;
    case CenterlineKind::arc:
      if (!(c.arc_radius > 0) || !(c.arc_angle > 0) || c.arc_angle > kTwoPi)
        fail(ErrorCode::spec, "arc needs a positive radius and an angle in (0, 2 pi]");
      length_ = c.arc_radius * c.arc_angle;
      break;
    case CenterlineKind::helix: {
      if (!(c.helix_radius > 0) || !(c.helix_turns > 0))
        fail(ErrorCode::spec, "helix needs a positive radius and turn count");
      length_ = helix_of(c).w * kTwoPi * c.helix_turns;
      break;
    }
    case CenterlineKind::aorta:
      if (!(c.arch_radius > 0) || c.ascending < 0 || c.descending < 0)
        fail(ErrorCode::spec, "aorta needs a positive arch radius and nonnegative legs");
      length_ = c.ascending + kPi * c.arch_radius + c.descending;
      break;
  }
  if (spec_.n_tau < 2 || spec_.n_theta < 3) fail(ErrorCode::spec, "tessellation needs n_tau >= 2, n_theta >= 3");
  if (spec_.noise < 0) fail(ErrorCode::spec, "noise must be nonnegative");

  double lo = kInf;
  double hi = -kInf;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j < 128; ++j) {
      const double r = radius(i / 400.0, kTwoPi * j / 128);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  if (!(lo > 0)) fail(ErrorCode::spec, "radius must stay positive (minimum " + std::to_string(lo) + ")");
  if (hi >= min_curvature_radius()) {
    std::ostringstream msg;
    msg << "radius " << hi << " mm reaches the centerline curvature radius "
        << min_curvature_radius() << " mm; the tube would self-intersect";
    fail(ErrorCode::spec, msg.str());
  }
}

double SyntheticVessel::min_curvature_radius() const noexcept {
  const auto& c = spec_.centerline;
  switch (c.kind) {
    case CenterlineKind::line: return kInf;
    case CenterlineKind::arc: return c.arc_radius;
    case CenterlineKind::helix: {
      const auto h = helix_of(c);
      return h.w * h.w / h.a;
    }
    case CenterlineKind::aorta: return c.arch_radius;
  }
  return kInf;
}

Vec3 SyntheticVessel::centerline(double tau) const {
  const auto& c = spec_.centerline;
  const double s = tau * length_;
  switch (c.kind) {
    case CenterlineKind::line: return {0.0, 0.0, s};
    case CenterlineKind::arc: {
      const double phi = s / c.arc_radius;
      return {c.arc_radius * (1.0 - std::cos(phi)), 0.0, c.arc_radius * std::sin(phi)};
    }
    case CenterlineKind::helix: {
      const auto h = helix_of(c);
      const double phi = s / h.w;
      return {h.a * std::cos(phi), h.a * std::sin(phi), h.b * phi};
    }
    case CenterlineKind::aorta: {
      const double r = c.arch_radius;
      if (s <= c.ascending) return {0.0, 0.0, s};
      const double arch = kPi * r;
      if (s <= c.ascending + arch) {
        const double phi = (s - c.ascending) / r;
        return {r * (1.0 - std::cos(phi)), 0.0, c.ascending + r * std::sin(phi)};
      }
      return {2.0 * r, 0.0, c.ascending - (s - c.ascending - arch)};
    }
  }
  return Vec3::Zero();
}

Frame SyntheticVessel::frame(double tau) const {
  const auto& c = spec_.centerline;
  const double s = tau * length_;
  Frame ref;
  switch (c.kind) {
    case CenterlineKind::line: ref = planar_frame(0.0); break;
    case CenterlineKind::arc: ref = planar_frame(s / c.arc_radius); break;
    case CenterlineKind::helix: {
      const auto h = helix_of(c);
      const double phi = s / h.w;
      const Vec3 T = Vec3(-h.a * std::sin(phi), h.a * std::cos(phi), h.b) / h.w;
      const Vec3 N(-std::cos(phi), -std::sin(phi), 0.0);
      const Vec3 B = T.cross(N);
      const double psi = h.b * phi / h.w;  // integrated torsion
      ref.t = T;
      ref.v1 = std::cos(psi) * N - std::sin(psi) * B;
      ref.v2 = std::sin(psi) * N + std::cos(psi) * B;
      break;
    }
    case CenterlineKind::aorta: {
      const double phi = std::clamp((s - c.ascending) / c.arch_radius, 0.0, kPi);
      ref = planar_frame(phi);
      break;
    }
  }
  const double ca = std::cos(spec_.frame_angle);
  const double sa = std::sin(spec_.frame_angle);
  Frame f;
  f.t = ref.t;
  f.v1 = ca * ref.v1 + sa * ref.v2;
  f.v2 = -sa * ref.v1 + ca * ref.v2;
  return f;
}

double SyntheticVessel::curvature(double tau) const {
  const auto& c = spec_.centerline;
  switch (c.kind) {
    case CenterlineKind::line: return 0.0;
    case CenterlineKind::arc: return 1.0 / c.arc_radius;
    case CenterlineKind::helix: {
      const auto h = helix_of(c);
      return h.a / (h.w * h.w);
    }
    case CenterlineKind::aorta: {
      const double s = tau * length_;
      return s > c.ascending && s < c.ascending + kPi * c.arch_radius ? 1.0 / c.arch_radius : 0.0;
    }
  }
  return 0.0;
}

double SyntheticVessel::radius(double tau, double theta) const {
  double r = spec_.base_radius;
  for (const auto& term : spec_.terms) {
    switch (term.kind) {
      case RadiusTermKind::sinusoidal:
        r += term.amplitude * std::sin(kTwoPi * term.m_tau * tau) * std::cos(term.m_theta * theta);
        break;
      case RadiusTermKind::valsalva: {
        const double z = (tau - term.center) / term.width;
        r += term.amplitude * std::exp(-z * z) * 0.5 * (1.0 + std::cos(3.0 * theta));
        break;
      }
    }
  }
  return r;
}

Vec3 SyntheticVessel::point(double tau, double theta, double rho) const {
  const Frame f = frame(tau);
  return centerline(tau) + rho * (std::cos(theta) * f.v1 + std::sin(theta) * f.v2);
}

double SyntheticVessel::closest_parameter(const Vec3& x) const {
  const auto& c = spec_.centerline;
  switch (c.kind) {
    case CenterlineKind::line: return std::clamp(x.z(), 0.0, length_) / length_;
    case CenterlineKind::arc:
      return closest_on_arc(x, {c.arc_radius, 0.0, 0.0}, c.arc_radius, c.arc_angle) * c.arc_radius /
             length_;
    case CenterlineKind::aorta: {
      const double r = c.arch_radius;
      const double s_up = std::clamp(x.z(), 0.0, c.ascending);
      const double s_arch =
          c.ascending + r * closest_on_arc(x, {r, 0.0, c.ascending}, r, kPi);
      const double s_down = c.ascending + kPi * r + std::clamp(c.ascending - x.z(), 0.0, c.descending);
      double best_s = s_up;
      double best = (centerline(s_up / length_) - x).squaredNorm();
      for (double s : {s_arch, s_down}) {
        const double d = (centerline(s / length_) - x).squaredNorm();
        if (d < best) {
          best = d;
          best_s = s;
        }
      }
      return best_s / length_;
    }
    case CenterlineKind::helix: {
      // dense scan, then Newton on the stationarity condition in each basin
      constexpr int kScan = 4096;
      const auto dist2 = [&](double t) { return (centerline(t) - x).squaredNorm(); };
      std::vector<double> d(kScan + 1);
      for (int i = 0; i <= kScan; ++i) d[static_cast<std::size_t>(i)] = dist2(static_cast<double>(i) / kScan);
      double best_t = 0.0;
      double best = d[0];
      if (d[kScan] < best) {
        best = d[kScan];
        best_t = 1.0;
      }
      const auto h = helix_of(c);
      for (int i = 1; i < kScan; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (d[k] > d[k - 1] || d[k] > d[k + 1]) continue;
        double phi = (static_cast<double>(i) / kScan) * length_ / h.w;
        for (int it = 0; it < 50; ++it) {
          // g(phi) = c'(phi).(c - x) with c(phi) = (a cos, a sin, b phi)
          const Vec3 p(h.a * std::cos(phi), h.a * std::sin(phi), h.b * phi);
          const Vec3 d1(-h.a * std::sin(phi), h.a * std::cos(phi), h.b);
          const Vec3 d2(-h.a * std::cos(phi), -h.a * std::sin(phi), 0.0);
          const double g = d1.dot(p - x);
          const double dg = d2.dot(p - x) + d1.squaredNorm();
          const double step = g / dg;
          phi -= step;
          if (std::abs(step) < 1e-15) break;
        }
        const double t = std::clamp(phi * h.w / length_, 0.0, 1.0);
        const double dt = dist2(t);
        if (dt < best) {
          best = dt;
          best_t = t;
        }
      }
      return best_t;
    }
  }
  return 0.0;
}

VesselCoordinates SyntheticVessel::closest(const Vec3& x) const {
  VesselCoordinates out;
  out.tau = closest_parameter(x);
  const Vec3 offset = x - centerline(out.tau);
  const Frame f = frame(out.tau);
  out.rho = offset.norm();
  if (out.rho < 1e-12) {
    out.degenerate = true;
  } else {
    double th = std::atan2(offset.dot(f.v2), offset.dot(f.v1));
    if (th < 0) th += kTwoPi;
    out.theta = th >= kTwoPi ? 0.0 : th;
    out.boundary = (out.tau == 0.0 || out.tau == 1.0) && std::abs(offset.dot(f.t)) > 1e-7 * out.rho;
  }
  out.valid = out.rho * curvature(out.tau) < 1.0;
  return out;
}

std::vector<VesselCoordinates> SyntheticVessel::vertex_coordinates() const {
  const int nt = spec_.n_tau;
  const int nh = spec_.n_theta;
  std::mt19937_64 rng(spec_.seed);
  std::normal_distribution<double> gauss(0.0, spec_.noise > 0 ? spec_.noise : 1.0);
  std::vector<VesselCoordinates> out;
  out.reserve(static_cast<std::size_t>(nt) * static_cast<std::size_t>(nh));
  for (int i = 0; i < nt; ++i) {
    const double tau = static_cast<double>(i) / (nt - 1);
    for (int j = 0; j < nh; ++j) {
      VesselCoordinates v;
      v.tau = tau;
      v.theta = kTwoPi * j / nh;
      v.rho = radius(tau, v.theta);
      if (spec_.noise > 0) v.rho += gauss(rng);
      out.push_back(v);
    }
  }
  return out;
}

TriangleMesh SyntheticVessel::mesh() const {
  const auto coords = vertex_coordinates();
  TriangleMesh mesh;
  mesh.vertices.resize(coords.size());
  parallel_for(coords.size(), [&](std::size_t k) {
    mesh.vertices[k] = point(coords[k].tau, coords[k].theta, coords[k].rho);
  });
  const int nt = spec_.n_tau;
  const int nh = spec_.n_theta;
  for (int i = 0; i + 1 < nt; ++i)
    for (int j = 0; j < nh; ++j) {
      const int jn = (j + 1) % nh;
      const int a = i * nh + j;
      const int b = i * nh + jn;
      const int c = (i + 1) * nh + j;
      const int d = (i + 1) * nh + jn;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({b, d, c});
    }
  return mesh;
}

std::vector<Vec3> SyntheticVessel::centerline_samples(int n) const {
  std::vector<Vec3> out;
  for (int i = 0; i < n; ++i) out.push_back(centerline(static_cast<double>(i) / (n - 1)));
  return out;
}

ScatteredField poiseuille_field(const SyntheticVessel& vessel, double u_max, double spacing,
                                double exterior_band) {
  if (!(spacing > 0)) fail(ErrorCode::precondition, "lattice spacing must be positive");
  if (!(exterior_band >= 0)) fail(ErrorCode::precondition, "exterior band must be non-negative");
  const double band = exterior_band * spacing;
  Aabb box;
  for (const auto& p : vessel.mesh().vertices) box.extend(p);
  const Vec3 lo = box.lo.array() - spacing - band;
  const Eigen::Array3i dims = ((box.hi.array() + band - lo.array()) / spacing).ceil().cast<int>() + 2;
  const auto nx = static_cast<std::size_t>(dims.x());
  const auto ny = static_cast<std::size_t>(dims.y());
  const auto nz = static_cast<std::size_t>(dims.z());
  std::vector<std::vector<std::pair<Vec3, double>>> rows(ny * nz);
  parallel_for(ny * nz, [&](std::size_t row) {
    const std::size_t j = row % ny;
    const std::size_t k = row / ny;
    for (std::size_t i = 0; i < nx; ++i) {
      const Vec3 x = lo + spacing * Vec3(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
      const auto c = vessel.closest(x);
      if (c.boundary) continue;
      const double r = vessel.radius(c.tau, c.theta);
      if (c.rho > r + band) continue;
      const double rn = c.rho / r;
      rows[row].emplace_back(x, u_max * (1.0 - rn * rn));
    }
  }, 1);
  ScatteredField field;
  field.name = "velocity";
  field.units = "m/s";
  for (const auto& row : rows)
    for (const auto& [p, v] : row) {
      field.points.push_back(p);
      field.values.push_back(v);
    }
  return field;
}

}  // namespace vcs
