#include "vcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "vcs/error.hpp"
#include "vcs/mesh_distance.hpp"
#include "vcs/parallel.hpp"

namespace vcs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

VesselModel::VesselModel(SplineCurve3 centerline, BivariateSpline wall, Vec3 v1_0, std::string id)
    : centerline_(std::move(centerline)),
      wall_(std::move(wall)),
      v1_0_(std::move(v1_0)),
      id_(std::move(id)),
      context_(std::make_shared<const VcsContext>(centerline_, v1_0_)) {}

ModelDims VesselModel::dims() const noexcept {
  return {centerline_.spans(), wall_.knots_tau().spans(), wall_.knots_theta().spans()};
}

Vec3 VesselModel::surface_point(double tau, double theta) const {
  return from_vcs(*context_, tau, theta, wall_(tau, theta));
}

VesselModel VesselModel::with_id(std::string id) const {
  VesselModel copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

VesselModel VesselModel::transformed(const RigidTransform& T) const {
  return {centerline_.transformed(T), wall_, T.rotate(v1_0_), id_};
}

RadiusProbe probe_wall(const BivariateSpline& wall, int n_tau, int n_theta) {
  RadiusProbe best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int i = 0; i < n_tau; ++i) {
    const double tau = n_tau == 1 ? 0.0 : static_cast<double>(i) / (n_tau - 1);
    for (int j = 0; j < n_theta; ++j) {
      const double theta = kTwoPi * j / n_theta;
      const double r = wall(tau, theta);
      if (r < best.min_radius) best = {r, tau, theta};
    }
  }
  return best;
}

std::vector<VesselCoordinates> vertex_coordinates(const TriangleMesh& mesh, const VcsContext& ctx) {
  std::vector<VesselCoordinates> coords(mesh.vertices.size());
  parallel_for(coords.size(), [&](std::size_t i) { coords[i] = to_vcs(ctx, mesh.vertices[i]); });
  return coords;
}

BivariateSpline fit_wall(std::span<const VesselCoordinates> coords, int K, int R,
                         const FitOptions& options) {
  if (coords.empty()) fail(ErrorCode::input, "wall mesh has no vertices");
  std::size_t invalid = 0;
  std::vector<SurfaceSample> samples;
  samples.reserve(coords.size());
  for (const auto& c : coords) {
    if (!c.valid) {
      ++invalid;
      continue;
    }
    if (c.degenerate || c.boundary) continue;
    if (c.tau <= options.tau_margin || c.tau >= 1.0 - options.tau_margin) continue;
    samples.push_back({c.tau, c.theta, c.rho});
  }
  const auto n = static_cast<double>(coords.size());
  if (static_cast<double>(invalid) > options.max_invalid_fraction * n) {
    std::ostringstream msg;
    msg << invalid << " of " << coords.size() << " vertices lie outside the coordinate validity region";
    fail(ErrorCode::validity, msg.str());
  }

  BivariateSpline wall = fit_surface(samples, K, R);
  const auto probe = probe_wall(wall, options.probe_tau, options.probe_theta);
  if (!(probe.min_radius > 0.0)) {
    std::ostringstream msg;
    msg << "fitted wall radius " << probe.min_radius << " at tau=" << probe.tau
        << ", theta=" << probe.theta << " (cross section not star-shaped from the centerline)";
    fail(ErrorCode::star_convexity, msg.str());
  }
  return wall;
}

VesselModel fit_model(const TriangleMesh& mesh, const VcsContext& ctx, const ModelDims& dims,
                      const FitOptions& options) {
  if (mesh.vertices.empty()) fail(ErrorCode::input, "wall mesh has no vertices");
  if (dims.L != ctx.curve().spans())
    fail(ErrorCode::precondition, "L=" + std::to_string(dims.L) +
                                      " does not match the centerline (" +
                                      std::to_string(ctx.curve().spans()) + " spans)");
  const auto coords = vertex_coordinates(mesh, ctx);
  return {ctx.curve(), fit_wall(coords, dims.K, dims.R, options), ctx.v1_0()};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  if (hi == lo) return a;
  const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(hi), values.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

namespace {

void summarize(ResidualReport& report, int bins) {
  const auto& res = report.residual;
  if (!res.empty()) {
    report.mean = std::accumulate(res.begin(), res.end(), 0.0) / static_cast<double>(res.size());
    report.max = *std::max_element(res.begin(), res.end());
    report.p75 = quantile(res, 0.75);
  }
  bins = std::max(bins, 1);
  const double width = report.max > 0.0 ? report.max / bins : 1.0;
  report.histogram.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) report.histogram.edges[static_cast<std::size_t>(b)] = b * width;
  report.histogram.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : res) {
    const int b = std::min(static_cast<int>(v / width), bins - 1);
    ++report.histogram.counts[static_cast<std::size_t>(b)];
  }
}

}  // namespace

ResidualReport residuals(const TriangleMesh& mesh, const VesselModel& model,
                         const ResidualOptions& options) {
  const std::size_t n = mesh.vertices.size();
  std::vector<double> r(n, -1.0);
  const auto& ctx = model.context();
  parallel_for(n, [&](std::size_t i) {
    const auto c = to_vcs(ctx, mesh.vertices[i]);
    if (c.boundary || c.degenerate) return;
    r[i] = (mesh.vertices[i] - model.surface_point(c.tau, c.theta)).norm();
  });

  ResidualReport report;
  for (std::size_t i = 0; i < n; ++i) {
    if (r[i] < 0.0) {
      ++report.excluded;
      continue;
    }
    report.vertex.push_back(i);
    report.residual.push_back(r[i]);
  }
  summarize(report, options.bins);

  if (options.nearest_surface && !report.vertex.empty()) {
    const TriangleMesh fine = tessellate(model, options.nearest_tau, options.nearest_theta);
    const TriangleBvh bvh(fine);
    report.nearest.resize(report.vertex.size());
    parallel_for(report.vertex.size(), [&](std::size_t k) {
      report.nearest[k] = bvh.closest(mesh.vertices[report.vertex[k]]).distance;
    });
    report.nearest_mean = std::accumulate(report.nearest.begin(), report.nearest.end(), 0.0) /
                          static_cast<double>(report.nearest.size());
    report.nearest_max = *std::max_element(report.nearest.begin(), report.nearest.end());
  }
  return report;
}

ResidualReport radial_residuals(std::span<const VesselCoordinates> coords, const BivariateSpline& wall,
                                int bins) {
  ResidualReport report;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    if (c.boundary || c.degenerate) {
      ++report.excluded;
      continue;
    }
    report.vertex.push_back(i);
    report.residual.push_back(std::abs(c.rho - wall(c.tau, c.theta)));
  }
  summarize(report, bins);
  return report;
}

TriangleMesh tessellate(const VesselModel& model, int n_tau, int n_theta) {
  if (n_tau < 2 || n_theta < 3)
    fail(ErrorCode::precondition, "tessellation needs n_tau >= 2 and n_theta >= 3");
  TriangleMesh mesh;
  const auto nt = static_cast<std::size_t>(n_tau);
  const auto nh = static_cast<std::size_t>(n_theta);
  mesh.vertices.resize(nt * nh);
  parallel_for(nt, [&](std::size_t i) {
    const double tau = static_cast<double>(i) / static_cast<double>(nt - 1);
    for (std::size_t j = 0; j < nh; ++j)
      mesh.vertices[i * nh + j] = model.surface_point(tau, kTwoPi * static_cast<double>(j) / n_theta);
  }, 8);
  mesh.faces.reserve(2 * (nt - 1) * nh);
  for (int i = 0; i + 1 < n_tau; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      const int jn = (j + 1) % n_theta;
      const int a = i * n_theta + j;
      const int b = i * n_theta + jn;
      const int c = (i + 1) * n_theta + j;
      const int d = (i + 1) * n_theta + jn;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({b, d, c});
    }
  }
  return mesh;
}

FeatureVector to_feature_vector(const VesselModel& model) {
  FeatureVector fv{Eigen::VectorXd(static_cast<Eigen::Index>(model.dims().feature_length())),
                   model.dims()};
  Eigen::Index k = 0;
  for (const auto& c : model.centerline().coefficients())
    for (int d = 0; d < 3; ++d) fv.values[k++] = c[d];
  const auto& b = model.wall().coefficients();
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) fv.values[k++] = b(i, j);
  return fv;
}

VesselModel from_feature_vector(const Eigen::VectorXd& values, const ModelDims& dims,
                                const Vec3& v1_0, std::string id) {
  if (dims.L < 1 || dims.K < 1 || dims.R < 3)
    fail(ErrorCode::layout, "invalid feature dimensions");
  if (static_cast<std::size_t>(values.size()) != dims.feature_length()) {
    std::ostringstream msg;
    msg << "feature vector has " << values.size() << " values, (L,K,R)=(" << dims.L << ","
        << dims.K << "," << dims.R << ") needs " << dims.feature_length();
    fail(ErrorCode::layout, msg.str());
  }
  std::vector<Vec3> control(static_cast<std::size_t>(dims.centerline_coefficients()));
  Eigen::Index k = 0;
  for (auto& c : control) {
    c = values.segment<3>(k);
    k += 3;
  }
  Eigen::MatrixXd b(dims.wall_rows(), dims.wall_cols());
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = values[k++];

  SplineCurve3 curve(std::move(control), dims.L);
  const Vec3 t0 = curve.unit_tangent(0.0);
  Vec3 v1 = v1_0 - v1_0.dot(t0) * t0;
  if (v1.norm() < 1e-9) fail(ErrorCode::degenerate_frame, "v1_0 is parallel to the new start tangent");
  v1.normalize();
  return {std::move(curve), BivariateSpline(std::move(b), dims.K, dims.R), v1, std::move(id)};
}

}  // namespace vcs
