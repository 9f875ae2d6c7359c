#include "vcs/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "vcs/error.hpp"
#include "vcs/parallel.hpp"

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace vcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using Entry = std::pair<BPoint, std::size_t>;
using Tree = bgi::rtree<Entry, bgi::quadratic<16>>;

BPoint to_bpoint(const Vec3& p) { return {p.x(), p.y(), p.z()}; }

double grid_tau(int i, int n) { return n == 1 ? 0.0 : static_cast<double>(i) / (n - 1); }

}  // namespace

MeasurementGrid::MeasurementGrid(int n_tau, int n_theta, int n_rho)
    : n_tau_(n_tau), n_theta_(n_theta), n_rho_(n_rho) {
  if (n_tau < 1 || n_theta < 3 || n_rho < 1)
    fail(ErrorCode::precondition, "grid needs n_tau >= 1, n_theta >= 3, n_rho >= 1");
  if (n_rho == 1) {
    for (int i = 0; i < n_tau; ++i)
      for (int j = 0; j < n_theta; ++j) nodes_.push_back({grid_tau(i, n_tau), kTwoPi * j / n_theta, 1.0});
    return;
  }
  for (int i = 0; i < n_tau; ++i) nodes_.push_back({grid_tau(i, n_tau), 0.0, 0.0});
  for (int k = 1; k < n_rho; ++k)
    for (int i = 0; i < n_tau; ++i)
      for (int j = 0; j < n_theta; ++j)
        nodes_.push_back({grid_tau(i, n_tau), kTwoPi * j / n_theta,
                          static_cast<double>(k) / (n_rho - 1)});
}

std::size_t MeasurementGrid::index(int i, int j, int k) const {
  if (i < 0 || i >= n_tau_ || j < 0 || j >= n_theta_ || k < 0 || k >= n_rho_)
    fail(ErrorCode::domain, "grid index out of range");
  const auto layer = static_cast<std::size_t>(n_tau_) * static_cast<std::size_t>(n_theta_);
  const auto in_layer = static_cast<std::size_t>(i) * static_cast<std::size_t>(n_theta_) +
                        static_cast<std::size_t>(j);
  if (n_rho_ == 1) return in_layer;
  if (k == 0) return static_cast<std::size_t>(i);
  return static_cast<std::size_t>(n_tau_) + static_cast<std::size_t>(k - 1) * layer + in_layer;
}

std::vector<std::size_t> MeasurementGrid::wall_subset() const {
  const auto layer = static_cast<std::size_t>(n_tau_) * static_cast<std::size_t>(n_theta_);
  std::vector<std::size_t> out(layer);
  const std::size_t first = nodes_.size() - layer;
  for (std::size_t n = 0; n < layer; ++n) out[n] = first + n;
  return out;
}

MeasurementGrid build_grid(int n_tau, int n_theta, int n_rho) { return {n_tau, n_theta, n_rho}; }

std::vector<Vec3> materialize(const MeasurementGrid& grid, const VesselModel& model,
                              std::span<const std::size_t> subset) {
  std::vector<Vec3> out(subset.size());
  const auto& nodes = grid.nodes();
  parallel_for(subset.size(), [&](std::size_t n) {
    const auto& g = nodes[subset[n]];
    const double rho = g.rho_n == 0.0 ? 0.0 : g.rho_n * model.wall()(g.tau, g.theta);
    out[n] = from_vcs(model.context(), g.tau, g.theta, rho);
  });
  return out;
}

std::vector<Vec3> materialize(const MeasurementGrid& grid, const VesselModel& model) {
  std::vector<std::size_t> all(grid.size());
  for (std::size_t n = 0; n < all.size(); ++n) all[n] = n;
  return materialize(grid, model, all);
}

std::vector<std::size_t> SampledField::node_indices() const {
  if (wall_only) return grid.wall_subset();
  std::vector<std::size_t> all(grid.size());
  for (std::size_t n = 0; n < all.size(); ++n) all[n] = n;
  return all;
}

Resampled resample(const ScatteredField& field, std::span<const Vec3> targets,
                   const ResampleOptions& options) {
  if (field.points.empty()) fail(ErrorCode::input, "scattered field has no points");
  const auto nc = static_cast<std::size_t>(field.components);
  if (field.components < 1 || field.values.size() != field.points.size() * nc)
    fail(ErrorCode::input, "scattered field values do not match points x components");

  std::vector<Entry> entries;
  entries.reserve(field.points.size());
  for (std::size_t i = 0; i < field.points.size(); ++i) entries.emplace_back(to_bpoint(field.points[i]), i);
  const Tree tree(entries.begin(), entries.end());

  // median spacing between field points sets the gap cutoff
  Resampled out;
  if (field.points.size() > 1) {
    std::vector<double> spacing(field.points.size());
    parallel_for(field.points.size(), [&](std::size_t i) {
      std::vector<Entry> hits;
      tree.query(bgi::nearest(entries[i].first, 2), std::back_inserter(hits));
      double best = std::numeric_limits<double>::infinity();
      for (const auto& h : hits)
        if (h.second != i) best = std::min(best, (field.points[h.second] - field.points[i]).norm());
      spacing[i] = best;
    });
    auto mid = spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2);
    std::nth_element(spacing.begin(), mid, spacing.end());
    out.cutoff = options.cutoff_factor * *mid;
  } else {
    out.cutoff = std::numeric_limits<double>::infinity();
  }

  out.values.assign(targets.size() * nc, 0.0);
  std::vector<char> gap(targets.size(), 0);
  const auto k = static_cast<unsigned>(std::max(options.neighbors, 1));
  parallel_for(targets.size(), [&](std::size_t t) {
    std::vector<Entry> hits;
    tree.query(bgi::nearest(to_bpoint(targets[t]), k), std::back_inserter(hits));
    std::vector<double> dist(hits.size());
    std::size_t nearest = 0;
    for (std::size_t h = 0; h < hits.size(); ++h) {
      dist[h] = (field.points[hits[h].second] - targets[t]).norm();
      if (dist[h] < dist[nearest]) nearest = h;
    }
    double* dst = &out.values[t * nc];
    const auto copy_from = [&](std::size_t src) {
      for (std::size_t c = 0; c < nc; ++c) dst[c] = field.values[src * nc + c];
    };
    if (dist[nearest] < options.coincidence) {
      copy_from(hits[nearest].second);
      return;
    }
    if (dist[nearest] > out.cutoff) {
      copy_from(hits[nearest].second);
      gap[t] = 1;
      return;
    }
    double wsum = 0.0;
    for (std::size_t h = 0; h < hits.size(); ++h) {
      const double w = std::pow(dist[h], -options.power);
      wsum += w;
      for (std::size_t c = 0; c < nc; ++c) dst[c] += w * field.values[hits[h].second * nc + c];
    }
    for (std::size_t c = 0; c < nc; ++c) dst[c] /= wsum;
  }, 64);
  out.gaps = static_cast<std::size_t>(std::count(gap.begin(), gap.end(), 1));
  return out;
}

SampledField sample_field(const ScatteredField& field, const VesselModel& model,
                          const MeasurementGrid& grid, bool wall_only,
                          const ResampleOptions& options) {
  SampledField out;
  out.grid = grid;
  out.wall_only = wall_only;
  out.components = field.components;
  out.name = field.name;
  out.units = field.units;
  const auto nodes = out.node_indices();
  const auto targets = materialize(grid, model, nodes);
  auto r = resample(field, targets, options);
  out.values = std::move(r.values);
  out.gaps = r.gaps;
  return out;
}

SampledField magnitude(const SampledField& field) {
  SampledField out = field;
  out.components = 1;
  const auto nc = static_cast<std::size_t>(field.components);
  const std::size_t n = field.values.size() / nc;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < nc; ++c) s += field.values[i * nc + c] * field.values[i * nc + c];
    out.values[i] = std::sqrt(s);
  }
  out.name = field.name + "_magnitude";
  return out;
}

FieldAtlas field_pca(std::span<const SampledField> fields) {
  if (fields.size() < 2) fail(ErrorCode::cardinality, "field PCA needs at least 2 fields");
  const auto& first = fields.front();
  Eigen::MatrixXd data(static_cast<Eigen::Index>(fields.size()),
                       static_cast<Eigen::Index>(first.values.size()));
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto& f = fields[k];
    if (!(f.grid == first.grid) || f.wall_only != first.wall_only ||
        f.components != first.components || f.values.size() != first.values.size()) {
      std::ostringstream msg;
      msg << "field " << k << " is not on the same grid/layout as field 0";
      fail(ErrorCode::layout, msg.str());
    }
    for (std::size_t v = 0; v < f.values.size(); ++v) {
      if (!std::isfinite(f.values[v])) fail(ErrorCode::input, "field " + std::to_string(k) + " has non-finite values");
      data(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v)) = f.values[v];
    }
  }
  return {first.grid, first.wall_only, first.components, first.name, first.units,
          principal_components(data)};
}

std::vector<std::size_t> threshold_region(const Eigen::VectorXd& values, int components,
                                          double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    fail(ErrorCode::precondition, "threshold fraction must lie in (0, 1)");
  if (components < 1 || values.size() % components != 0)
    fail(ErrorCode::layout, "value count is not a multiple of the component count");
  const Eigen::Index n = values.size() / components;
  Eigen::VectorXd mag(n);
  for (Eigen::Index i = 0; i < n; ++i) mag[i] = values.segment(i * components, components).norm();
  std::vector<std::size_t> out;
  const double peak = n > 0 ? mag.maxCoeff() : 0.0;
  if (!(peak > 0.0)) return out;
  for (Eigen::Index i = 0; i < n; ++i)
    if (mag[i] >= fraction * peak) out.push_back(static_cast<std::size_t>(i));
  return out;
}

}  // namespace vcs
