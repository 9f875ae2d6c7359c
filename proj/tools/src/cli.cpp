#include "vcs/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcs/atlas.hpp"
#include "vcs/cohort.hpp"
#include "vcs/frames.hpp"
#include "vcs/io/mesh_io.hpp"
#include "vcs/io/tables.hpp"
#include "vcs/parallel.hpp"
#include "vcs/synthetic.hpp"

namespace vcs::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kMinSpans = kDegree + 2;
constexpr int kMaxSpans = 400;

[[noreturn]] void usage_error(const std::string& msg) { throw CLI::ValidationError(msg); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    usage_error("'" + s + "' is not an integer");
  }
  if (pos != s.size()) usage_error("'" + s + "' is not an integer");
  return v;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    usage_error("'" + s + "' is not a number");
  }
  if (pos != s.size()) usage_error("'" + s + "' is not a number");
  return v;
}

// Model documents in a directory, sorted by file name; other JSON files skipped.
std::vector<std::pair<fs::path, io::ModelDocument>> load_model_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::input, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<fs::path, io::ModelDocument>> out;
  for (const auto& f : files) {
    const std::string text = io::read_file(f);
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("schema", "") != "vcs-model") continue;
    out.emplace_back(f, io::load_model(text));
  }
  return out;
}

std::vector<fs::path> csv_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::input, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

VesselModel load_model_file(const fs::path& p) { return io::read_model(p).model; }

std::string hash_of(const fs::path& p) { return io::fnv1a_hex(io::read_file(p)); }

void add_span_option(CLI::App* cmd, const char* name, int& value, const char* help) {
  cmd->add_option(name, value, help)->check(CLI::Range(kMinSpans, kMaxSpans))->capture_default_str();
}

// ---------------------------------------------------------------- commands

struct Common {
  bool error_json = false;
};

struct SynthArgs {
  std::string spec, out, oracle;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  auto spec = io::load_synthetic_spec(io::read_file(a.spec));
  if (a.noise) spec.noise = *a.noise;
  if (a.seed) spec.seed = *a.seed;
  const SyntheticVessel vessel(spec);
  const auto mesh = vessel.mesh();
  io::write_mesh(mesh, a.out);
  if (!a.oracle.empty()) io::write_file(a.oracle, io::dump_oracle(vessel));
  out << "wrote " << mesh.faces.size() << " triangles, " << mesh.vertices.size() << " vertices to "
      << a.out << "\n";
}

struct CenterlineArgs {
  std::string mesh, out, pA, pB, v1;
  double voxel = 0.5;
  int L = 9;
};

void cmd_centerline(const CenterlineArgs& a, std::ostream& out) {
  CenterlineSettings s;
  s.voxel = a.voxel;
  s.spans = a.L;
  if (!a.pA.empty()) s.pA = parse_point(a.pA);
  if (!a.pB.empty()) s.pB = parse_point(a.pB);
  if (!a.v1.empty()) s.v1 = parse_point(a.v1);
  auto doc = extract_centerline(io::read_mesh(a.mesh), s);
  doc.provenance.source_mesh_hash = hash_of(a.mesh);
  io::write_file(a.out, io::dump_centerline(doc));
  out << "centerline with " << a.L << " spans, min clearance " << doc.min_clearance << " mm -> "
      << a.out << "\n";
}

struct FitArgs {
  std::string mesh, centerline, out;
  int L = 9, K = 19, R = 15;
};

void cmd_fit(const FitArgs& a, std::ostream& out) {
  const auto mesh = io::read_mesh(a.mesh);
  const auto cl = io::load_centerline(io::read_file(a.centerline));
  const SplineCurve3 curve = cl.curve.spans() == a.L ? cl.curve : respan(cl.curve, a.L);
  const Vec3 t0 = curve.unit_tangent(0.0);
  const Vec3 v1 = (cl.v1_0 - cl.v1_0.dot(t0) * t0).normalized();
  const VcsContext ctx(curve, v1);
  auto model = fit_model(mesh, ctx, {a.L, a.K, a.R});
  model = model.with_id(fs::path(a.mesh).stem().string());
  io::write_model(a.out, {model, {hash_of(a.mesh)}});
  out << "model (L,K,R)=(" << a.L << "," << a.K << "," << a.R << "), "
      << model.dims().feature_length() << " features -> " << a.out << "\n";
}

struct CoordsArgs {
  std::string model, points, out;
  bool inverse = false;
};

void cmd_coords(const CoordsArgs& a, std::ostream& out) {
  const auto model = load_model_file(a.model);
  const auto& ctx = model.context();
  const auto in = io::read_csv(a.points);
  io::Table t;
  if (a.inverse) {
    const auto ct = in.require("tau");
    const auto ch = in.require("theta");
    const auto cr = in.require("rho");
    t.columns = {"tau", "theta", "rho", "x", "y", "z"};
    t.rows.resize(in.rows.size());
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
      const auto& r = in.rows[i];
      const Vec3 x = from_vcs(ctx, r[ct], r[ch], r[cr]);
      t.rows[i] = {r[ct], r[ch], r[cr], x.x(), x.y(), x.z()};
    }
  } else {
    const auto pts = io::table_points(in);
    t.columns = {"x", "y", "z", "tau", "theta", "rho", "rho_n", "valid", "boundary", "degenerate"};
    t.rows.resize(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const auto c = to_vcs(ctx, pts[i]);
      const double rw = model.wall()(c.tau, c.theta);
      const double rho_n = rw > 0 ? c.rho / rw : std::nan("");
      t.rows[i] = {pts[i].x(), pts[i].y(), pts[i].z(), c.tau, c.theta, c.rho, rho_n,
                   c.valid ? 1.0 : 0.0, c.boundary ? 1.0 : 0.0, c.degenerate ? 1.0 : 0.0};
    });
  }
  io::write_csv(a.out, t);
  out << "converted " << t.rows.size() << " points -> " << a.out << "\n";
}

struct ResidualArgs {
  std::string mesh, model, report;
  bool no_nearest = false;
};

void cmd_residuals(const ResidualArgs& a, std::ostream& out) {
  const auto mesh = io::read_mesh(a.mesh);
  const auto model = load_model_file(a.model);
  ResidualOptions opt;
  opt.nearest_surface = !a.no_nearest;
  const auto r = residuals(mesh, model, opt);
  io::write_file(a.report, io::dump_residual_report(r, model.dims()));
  out << "mean " << r.mean << " mm, p75 " << r.p75 << " mm, max " << r.max << " mm ("
      << r.excluded << " excluded) -> " << a.report << "\n";
}

struct SweepArgs {
  std::string mesh, out, centerline, L = "5..19", K = "5..19", R = "5..19", v1;
  double voxel = 0.5;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const auto Ls = parse_int_range(a.L);
  const auto Ks = parse_int_range(a.K);
  const auto Rs = parse_int_range(a.R);
  for (const auto* list : {&Ls, &Ks, &Rs})
    for (int v : *list)
      if (v < kMinSpans || v > kMaxSpans)
        usage_error("span count " + std::to_string(v) + " outside [" + std::to_string(kMinSpans) +
                    ", " + std::to_string(kMaxSpans) + "]");
  const auto mesh = io::read_mesh(a.mesh);

  // base centerline: given, or extracted once from the mesh
  std::optional<io::CenterlineDocument> base;
  if (!a.centerline.empty()) base = io::load_centerline(io::read_file(a.centerline));
  std::optional<DiscretePath> path;
  if (!base) {
    CenterlineSettings s;
    s.voxel = a.voxel;
    const auto capped = cap_boundaries(mesh);
    if (capped.loop_centroids.size() != 2)
      fail(ErrorCode::topology, "sweep needs a tube with exactly two open ends");
    const auto vol = voxelize(mesh, a.voxel);
    path = extract_path(vol, capped.loop_centroids[0], capped.loop_centroids[1]);
  }

  io::Table t;
  t.columns = {"L", "K", "R", "mean", "p75", "max", "excluded"};
  for (int L : Ls) {
    const SplineCurve3 curve = base ? respan(base->curve, L) : build_centerline(*path, L);
    Vec3 v1;
    if (base) {
      const Vec3 t0 = curve.unit_tangent(0.0);
      v1 = (base->v1_0 - base->v1_0.dot(t0) * t0).normalized();
    } else {
      v1 = initial_frame(curve, mesh.vertices).first;
    }
    const VcsContext ctx(curve, v1);
    const auto coords = vertex_coordinates(mesh, ctx);
    for (int K : Ks)
      for (int R : Rs) {
        try {
          const auto wall = fit_wall(coords, K, R);
          const auto r = radial_residuals(coords, wall);
          t.rows.push_back({double(L), double(K), double(R), r.mean, r.p75, r.max, double(r.excluded)});
        } catch (const Error& e) {
          err << "warning: (L,K,R)=(" << L << "," << K << "," << R << ") skipped: " << e.what() << "\n";
          const double nan = std::nan("");
          t.rows.push_back({double(L), double(K), double(R), nan, nan, nan, nan});
        }
      }
  }
  io::write_csv(a.out, t);
  out << "swept " << t.rows.size() << " configurations -> " << a.out << "\n";
}

struct TessellateArgs {
  std::string model, out;
  int n_tau = 200, n_theta = 100;
};

void cmd_tessellate(const TessellateArgs& a, std::ostream& out) {
  const auto mesh = tessellate(load_model_file(a.model), a.n_tau, a.n_theta);
  io::write_mesh(mesh, a.out);
  out << "wrote " << mesh.faces.size() << " triangles -> " << a.out << "\n";
}

struct CoregisterArgs {
  std::string models, grid = "64x32", out;
  int max_iter = 100;
  double tol = 1e-10;
};

void cmd_coregister(const CoregisterArgs& a, std::ostream& out, std::ostream& err) {
  const auto g = parse_dims(a.grid, 2);
  auto docs = load_model_dir(a.models);
  std::vector<VesselModel> models;
  std::vector<std::string> ids;
  for (auto& [path, doc] : docs) {
    models.push_back(doc.model);
    ids.push_back(path.filename().string());
  }
  CoregistrationOptions opt;
  opt.n_tau = g[0];
  opt.n_theta = g[1];
  opt.max_iter = a.max_iter;
  opt.tol = a.tol;
  const auto result = coregister(models, opt);
  if (!result.warning.empty()) err << "warning: " << result.warning << "\n";
  fs::create_directories(a.out);
  for (std::size_t k = 0; k < docs.size(); ++k)
    io::write_model(fs::path(a.out) / docs[k].first.filename(),
                    {result.aligned[k], docs[k].second.provenance});
  io::write_file(fs::path(a.out) / "transforms.json", io::dump_transforms(ids, result));
  out << "aligned " << models.size() << " models in " << result.iterations << " iterations -> "
      << a.out << "\n";
}

struct PcaArgs {
  std::string models, out;
};

void cmd_pca(const PcaArgs& a, std::ostream& out) {
  std::vector<VesselModel> models;
  for (auto& [path, doc] : load_model_dir(a.models)) models.push_back(doc.model);
  const auto cohort = shape_pca(models);
  io::write_file(a.out, io::dump_cohort(cohort));
  out << cohort.mode_count() << " modes from " << models.size() << " models -> " << a.out << "\n";
}

Eigen::VectorXd read_alphas(const fs::path& p) {
  const auto t = io::read_csv(p);
  std::vector<double> v;
  if (const int c = t.find("alpha"); c >= 0) {
    for (const auto& r : t.rows) v.push_back(r[static_cast<std::size_t>(c)]);
  } else {
    // single-row form: one column per mode
    if (t.rows.size() > 1) fail(ErrorCode::input, "alphas CSV needs an 'alpha' column or a single row");
    if (!t.rows.empty()) v = t.rows.front();
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct SynthShapeArgs {
  std::string cohort, alphas, out;
  bool sigma_units = false;
};

void cmd_synth_shape(const SynthShapeArgs& a, std::ostream& out, std::ostream& err) {
  const auto cohort = io::load_cohort(io::read_file(a.cohort));
  Eigen::VectorXd alpha = read_alphas(a.alphas);
  if (alpha.size() > cohort.mode_count())
    fail(ErrorCode::input, std::to_string(alpha.size()) + " coefficients for a cohort with " +
                               std::to_string(cohort.mode_count()) + " modes");
  if (a.sigma_units)
    for (Eigen::Index i = 0; i < alpha.size(); ++i) alpha[i] *= cohort.sigma(i);
  const auto s = synthesize(cohort, alpha);
  if (s.warning) err << "warning: " << *s.warning << "\n";
  io::write_model(a.out, {s.model.with_id("synthesized"), {}});
  out << "synthesized model -> " << a.out << "\n";
}

struct SampleFieldArgs {
  std::string model, field, grid = "64x32x8", out, array, name;
  bool wall_only = false;
};

void cmd_sample_field(const SampleFieldArgs& a, std::ostream& out, std::ostream& err) {
  const auto model = load_model_file(a.model);
  const auto g = parse_dims(a.grid, 3);
  const MeasurementGrid grid(g[0], g[1], g[2]);
  auto field = io::read_field(a.field, a.array);
  if (!a.name.empty()) field.name = a.name;
  const auto sampled = sample_field(field, model, grid, a.wall_only);
  const auto nodes = sampled.node_indices();
  const auto pos = materialize(grid, model, nodes);
  io::write_csv(a.out, io::sampled_field_table(sampled, pos));
  if (sampled.gaps > 0)
    err << "warning: " << sampled.gaps << " nodes beyond the gap cutoff filled by nearest neighbour\n";
  out << "sampled " << nodes.size() << " nodes -> " << a.out << "\n";
}

// Mean and modes of an atlas as a plot-ready table.
io::Table atlas_table(const FieldAtlas& atlas, const std::optional<VesselModel>& model, int max_modes) {
  SampledField layout;
  layout.grid = atlas.grid;
  layout.wall_only = atlas.wall_only;
  const auto nodes = layout.node_indices();
  const auto nc = static_cast<Eigen::Index>(atlas.components);
  const Eigen::Index nm = std::min<Eigen::Index>(atlas.pca.mode_count(), max_modes);
  io::Table t;
  t.columns = {"node", "tau", "theta", "rho_n"};
  if (model) t.columns.insert(t.columns.end(), {"x", "y", "z"});
  for (Eigen::Index c = 0; c < nc; ++c) t.columns.push_back("mean_" + std::to_string(c));
  for (Eigen::Index m = 0; m < nm; ++m)
    for (Eigen::Index c = 0; c < nc; ++c)
      t.columns.push_back("mode" + std::to_string(m) + "_" + std::to_string(c));
  std::vector<Vec3> pos;
  if (model) pos = materialize(atlas.grid, *model, nodes);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto& g = atlas.grid.nodes()[nodes[n]];
    std::vector<double> row{double(nodes[n]), g.tau, g.theta, g.rho_n};
    if (model) row.insert(row.end(), {pos[n].x(), pos[n].y(), pos[n].z()});
    const auto base = static_cast<Eigen::Index>(n) * nc;
    for (Eigen::Index c = 0; c < nc; ++c) row.push_back(atlas.pca.mean[base + c]);
    for (Eigen::Index m = 0; m < nm; ++m)
      for (Eigen::Index c = 0; c < nc; ++c) row.push_back(atlas.pca.modes(base + c, m));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct AtlasArgs {
  std::string sampled, out, csv, model;
  bool magnitude = false;
  int csv_modes = 3;
};

void cmd_atlas(const AtlasArgs& a, std::ostream& out) {
  std::vector<SampledField> fields;
  for (const auto& f : csv_files(a.sampled)) {
    auto s = io::table_sampled_field(io::read_csv(f));
    fields.push_back(a.magnitude ? magnitude(s) : std::move(s));
  }
  const auto atlas = field_pca(fields);
  io::write_file(a.out, io::dump_atlas(atlas));
  if (!a.csv.empty()) {
    std::optional<VesselModel> model;
    if (!a.model.empty()) model = load_model_file(a.model);
    io::write_csv(a.csv, atlas_table(atlas, model, a.csv_modes));
  }
  out << "atlas of " << fields.size() << " fields, " << atlas.pca.mode_count() << " modes -> "
      << a.out << "\n";
}

struct ModesArgs {
  std::string cohort, out_centerline, out_radius;
  int mode = 0, n_tau = 100, n_theta = 64;
  double scale = 2.0;
};

void cmd_modes(const ModesArgs& a, std::ostream& out) {
  const auto cohort = io::load_cohort(io::read_file(a.cohort));
  const auto d = mode_decomposition(cohort, a.mode, a.scale, a.n_tau, a.n_theta);
  io::Table c;
  c.columns = {"tau", "displacement"};
  for (std::size_t i = 0; i < d.tau.size(); ++i) c.rows.push_back({d.tau[i], d.displacement[i]});
  io::write_csv(a.out_centerline, c);
  if (!a.out_radius.empty()) {
    io::Table r;
    r.columns = {"tau", "theta", "radius_difference"};
    for (int i = 0; i < d.n_tau; ++i)
      for (int j = 0; j < d.n_theta; ++j)
        r.rows.push_back({d.tau[static_cast<std::size_t>(i)], 2.0 * std::numbers::pi * j / d.n_theta,
                          d.radius_difference[static_cast<std::size_t>(i * d.n_theta + j)]});
    io::write_csv(a.out_radius, r);
  }
  out << "mode " << a.mode << " at " << a.scale << " sigma -> " << a.out_centerline << "\n";
}

struct ThresholdArgs {
  std::string atlas, out, model;
  int mode = 0;
  double fraction = 0.8;
};

void cmd_threshold(const ThresholdArgs& a, std::ostream& out) {
  if (!(a.fraction > 0.0 && a.fraction < 1.0)) usage_error("--fraction must lie strictly between 0 and 1");
  const auto atlas = io::load_atlas(io::read_file(a.atlas));
  if (a.mode < 0 || a.mode >= atlas.pca.mode_count())
    usage_error("mode " + std::to_string(a.mode) + " out of range (atlas has " +
                std::to_string(atlas.pca.mode_count()) + " modes)");
  const Eigen::VectorXd values = atlas.pca.modes.col(a.mode);
  const auto region = threshold_region(values, atlas.components, a.fraction);
  SampledField layout;
  layout.grid = atlas.grid;
  layout.wall_only = atlas.wall_only;
  const auto nodes = layout.node_indices();
  std::optional<VesselModel> model;
  if (!a.model.empty()) model = load_model_file(a.model);
  io::Table t;
  t.columns = {"node", "tau", "theta", "rho_n"};
  if (model) t.columns.insert(t.columns.end(), {"x", "y", "z"});
  for (int c = 0; c < atlas.components; ++c) t.columns.push_back("value_" + std::to_string(c));
  std::vector<std::size_t> picked;
  for (auto n : region) picked.push_back(nodes[n]);
  std::vector<Vec3> pos;
  if (model) pos = materialize(atlas.grid, *model, picked);
  for (std::size_t k = 0; k < region.size(); ++k) {
    const auto& g = atlas.grid.nodes()[picked[k]];
    std::vector<double> row{double(picked[k]), g.tau, g.theta, g.rho_n};
    if (model) row.insert(row.end(), {pos[k].x(), pos[k].y(), pos[k].z()});
    for (int c = 0; c < atlas.components; ++c)
      row.push_back(values[static_cast<Eigen::Index>(region[k]) * atlas.components + c]);
    t.rows.push_back(std::move(row));
  }
  io::write_csv(a.out, t);
  out << region.size() << " of " << nodes.size() << " nodes above " << a.fraction << " of the peak -> "
      << a.out << "\n";
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::input:
    case ErrorCode::parse:
    case ErrorCode::spec:
    case ErrorCode::layout:
    case ErrorCode::cardinality:
    case ErrorCode::topology:
      return input;
    default:
      return numerical;
  }
}

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int a = to_int(text.substr(0, dots));
    std::string rest = text.substr(dots + 2);
    int step = 1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = to_int(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const int b = to_int(rest);
    if (step <= 0 || b < a) usage_error("invalid range '" + text + "'");
    for (int v = a; v <= b; v += step) out.push_back(v);
  } else {
    for (const auto& s : split(text, ',')) out.push_back(to_int(s));
  }
  if (out.empty()) usage_error("empty range '" + text + "'");
  return out;
}

Vec3 parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) usage_error("expected x,y,z but got '" + text + "'");
  return {to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
}

std::vector<int> parse_dims(const std::string& text, std::size_t count) {
  std::vector<int> out;
  for (const auto& s : split(text, 'x')) out.push_back(to_int(s));
  if (out.size() != count) usage_error("expected " + std::to_string(count) + " sizes like 64x32 in '" + text + "'");
  for (int v : out)
    if (v < 1) usage_error("grid sizes must be positive in '" + text + "'");
  return out;
}

SplineCurve3 respan(const SplineCurve3& curve, int spans) {
  const int n = std::max(1000, 20 * (spans + kDegree));
  std::vector<Vec3> pts(static_cast<std::size_t>(n));
  std::vector<double> params(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    params[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    pts[static_cast<std::size_t>(i)] = curve.position(params[static_cast<std::size_t>(i)]);
  }
  return fit_curve(pts, params, spans);
}

io::CenterlineDocument extract_centerline(const TriangleMesh& mesh, const CenterlineSettings& s) {
  if (!(s.voxel > 0)) usage_error("voxel spacing must be positive");
  Vec3 pA = Vec3::Zero();
  Vec3 pB = Vec3::Zero();
  if (!s.pA || !s.pB) {
    const auto capped = cap_boundaries(mesh);
    if (capped.loop_centroids.size() != 2)
      fail(ErrorCode::topology, "mesh has " + std::to_string(capped.loop_centroids.size()) +
                                    " open ends; pass --pA and --pB explicitly");
    pA = capped.loop_centroids[0];
    pB = capped.loop_centroids[1];
  }
  if (s.pA) pA = *s.pA;
  if (s.pB) pB = *s.pB;
  const auto vol = voxelize(mesh, s.voxel);
  const auto path = extract_path(vol, pA, pB);
  auto curve = build_centerline(path, s.spans);
  Vec3 v1;
  if (s.v1) {
    const Vec3 t0 = curve.unit_tangent(0.0);
    v1 = *s.v1 - s.v1->dot(t0) * t0;
    if (v1.norm() < 1e-9) fail(ErrorCode::degenerate_frame, "--v1 is parallel to the start tangent");
    v1.normalize();
  } else {
    v1 = initial_frame(curve, mesh.vertices).first;
  }
  io::CenterlineDocument doc{std::move(curve), v1, s.voxel, pA, pB, 0.0, {}};
  doc.min_clearance = path.clearance.empty()
                          ? 0.0
                          : *std::min_element(path.clearance.begin(), path.clearance.end());
  return doc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vessel coordinate system: centerlines, coordinates, wall models, cohorts and atlases", "vcs"};
  app.set_version_flag("--version", std::string(io::tool_version()));
  app.require_subcommand(1);
  Common common;
  app.add_flag("--error-json", common.error_json, "Print failures as a JSON object on stderr");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic vessel mesh and its oracle");
  c_synth->add_option("--spec", synth.spec, "Synthetic vessel JSON")->required();
  c_synth->add_option("--out", synth.out, "Output mesh (.stl or .obj)")->required();
  c_synth->add_option("--oracle", synth.oracle, "Output oracle JSON with exact vertex coordinates");
  c_synth->add_option("--noise", synth.noise, "Override the radial noise (mm)")->check(CLI::NonNegativeNumber);
  c_synth->add_option("--seed", synth.seed, "Override the noise seed");

  CenterlineArgs cl;
  auto* c_cl = app.add_subcommand("centerline", "Extract the centerline and initial frame of a tube mesh");
  c_cl->add_option("--mesh", cl.mesh, "Wall mesh (.stl or .obj)")->required();
  c_cl->add_option("--voxel", cl.voxel, "Voxel spacing (mm)")->check(CLI::PositiveNumber)->capture_default_str();
  c_cl->add_option("--pA", cl.pA, "Start seed x,y,z (default: first open-end centroid)");
  c_cl->add_option("--pB", cl.pB, "End seed x,y,z (default: second open-end centroid)");
  c_cl->add_option("--v1", cl.v1, "Explicit initial frame vector x,y,z");
  add_span_option(c_cl, "--L", cl.L, "Centerline knot spans");
  c_cl->add_option("--out", cl.out, "Output centerline JSON")->required();

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit the wall radius surface");
  c_fit->add_option("--mesh", fit.mesh, "Wall mesh")->required();
  c_fit->add_option("--centerline", fit.centerline, "Centerline JSON")->required();
  add_span_option(c_fit, "--L", fit.L, "Centerline knot spans");
  add_span_option(c_fit, "--K", fit.K, "Wall knot spans along tau");
  add_span_option(c_fit, "--R", fit.R, "Wall knot spans around theta");
  c_fit->add_option("--out", fit.out, "Output model JSON")->required();

  CoordsArgs co;
  auto* c_co = app.add_subcommand("coords", "Convert point tables between Cartesian and vessel coordinates");
  c_co->add_option("--model", co.model, "Model JSON")->required();
  c_co->add_option("--points", co.points, "CSV with x,y,z (or tau,theta,rho with --inverse)")->required();
  c_co->add_flag("--inverse", co.inverse, "Map (tau, theta, rho) to Cartesian");
  c_co->add_option("--out", co.out, "Output CSV")->required();

  ResidualArgs res;
  auto* c_res = app.add_subcommand("residuals", "Residuals of a model against a wall mesh");
  c_res->add_option("--mesh", res.mesh, "Wall mesh")->required();
  c_res->add_option("--model", res.model, "Model JSON")->required();
  c_res->add_option("--report", res.report, "Output report JSON")->required();
  c_res->add_flag("--no-nearest", res.no_nearest, "Skip the nearest-surface metric");

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "Residual statistics over ranges of (L, K, R)");
  c_sw->add_option("--mesh", sw.mesh, "Wall mesh")->required();
  c_sw->add_option("--centerline", sw.centerline, "Centerline JSON (default: extract from the mesh)");
  c_sw->add_option("--voxel", sw.voxel, "Voxel spacing when extracting (mm)")->check(CLI::PositiveNumber)->capture_default_str();
  c_sw->add_option("--L", sw.L, "Range a..b[:step] or list a,b,c")->capture_default_str();
  c_sw->add_option("--K", sw.K, "Range a..b[:step] or list a,b,c")->capture_default_str();
  c_sw->add_option("--R", sw.R, "Range a..b[:step] or list a,b,c")->capture_default_str();
  c_sw->add_option("--out", sw.out, "Output CSV")->required();

  TessellateArgs tess;
  auto* c_tess = app.add_subcommand("tessellate", "Regular triangle mesh of a model wall");
  c_tess->add_option("--model", tess.model, "Model JSON")->required();
  c_tess->add_option("--ntau", tess.n_tau, "Rings along tau")->check(CLI::Range(2, 100000))->capture_default_str();
  c_tess->add_option("--ntheta", tess.n_theta, "Vertices per ring")->check(CLI::Range(3, 100000))->capture_default_str();
  c_tess->add_option("--out", tess.out, "Output mesh (.stl or .obj)")->required();

  CoregisterArgs reg;
  auto* c_reg = app.add_subcommand("coregister", "Rigidly align a directory of models");
  c_reg->add_option("--models", reg.models, "Directory of model JSON files")->required();
  c_reg->add_option("--grid", reg.grid, "Correspondence grid n_tau x n_theta")->capture_default_str();
  c_reg->add_option("--max-iter", reg.max_iter, "Procrustes iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
  c_reg->add_option("--tol", reg.tol, "Mean-shape movement tolerance (mm)")->check(CLI::PositiveNumber)->capture_default_str();
  c_reg->add_option("--out", reg.out, "Output directory")->required();

  PcaArgs pca;
  auto* c_pca = app.add_subcommand("pca", "Statistical shape model of a directory of models");
  c_pca->add_option("--models", pca.models, "Directory of (aligned) model JSON files")->required();
  c_pca->add_option("--out", pca.out, "Output cohort JSON")->required();

  SynthShapeArgs ss;
  auto* c_ss = app.add_subcommand("synth-shape", "Model from mode coefficients");
  c_ss->add_option("--cohort", ss.cohort, "Cohort JSON")->required();
  c_ss->add_option("--alphas", ss.alphas, "CSV with an 'alpha' column or a single row")->required();
  c_ss->add_flag("--sigma-units", ss.sigma_units, "Coefficients are multiples of each mode's sigma");
  c_ss->add_option("--out", ss.out, "Output model JSON")->required();

  SampleFieldArgs sf;
  auto* c_sf = app.add_subcommand("sample-field", "Resample a scattered field on the measurement grid");
  c_sf->add_option("--model", sf.model, "Model JSON")->required();
  c_sf->add_option("--field", sf.field, "Field as CSV (x,y,z,values...) or legacy VTK")->required();
  c_sf->add_option("--array", sf.array, "VTK point-data array name");
  c_sf->add_option("--name", sf.name, "Field name override");
  c_sf->add_option("--grid", sf.grid, "n_tau x n_theta x n_rho")->capture_default_str();
  c_sf->add_flag("--wall-only", sf.wall_only, "Sample the wall layer only");
  c_sf->add_option("--out", sf.out, "Output sampled CSV")->required();

  AtlasArgs at;
  auto* c_at = app.add_subcommand("atlas", "Per-field PCA over a directory of sampled fields");
  c_at->add_option("--sampled", at.sampled, "Directory of sampled-field CSV files")->required();
  c_at->add_flag("--magnitude", at.magnitude, "Use the vector norm instead of components");
  c_at->add_option("--csv", at.csv, "Also export mean and leading modes as CSV");
  c_at->add_option("--csv-modes", at.csv_modes, "Modes in the CSV export")->check(CLI::NonNegativeNumber)->capture_default_str();
  c_at->add_option("--model", at.model, "Model used to add x,y,z to the CSV export");
  c_at->add_option("--out", at.out, "Output atlas JSON")->required();

  ModesArgs md;
  auto* c_md = app.add_subcommand("modes", "Centerline and radius parts of a shape mode");
  c_md->add_option("--cohort", md.cohort, "Cohort JSON")->required();
  c_md->add_option("--mode", md.mode, "Mode index")->check(CLI::NonNegativeNumber)->capture_default_str();
  c_md->add_option("--scale", md.scale, "Deformation in sigma units")->capture_default_str();
  c_md->add_option("--ntau", md.n_tau, "Samples along tau")->check(CLI::Range(2, 100000))->capture_default_str();
  c_md->add_option("--ntheta", md.n_theta, "Samples around theta")->check(CLI::Range(1, 100000))->capture_default_str();
  c_md->add_option("--out", md.out_centerline, "Output CSV of centerline displacement")->required();
  c_md->add_option("--radius-out", md.out_radius, "Output CSV of radius differences");

  ThresholdArgs th;
  auto* c_th = app.add_subcommand("threshold", "Nodes where an atlas mode is near its peak");
  c_th->add_option("--atlas", th.atlas, "Atlas JSON")->required();
  c_th->add_option("--mode", th.mode, "Mode index")->check(CLI::NonNegativeNumber)->capture_default_str();
  c_th->add_option("--fraction", th.fraction, "Fraction of the peak |value|, in (0, 1)")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  c_th->add_option("--model", th.model, "Model used to add x,y,z");
  c_th->add_option("--out", th.out, "Output CSV")->required();

  const auto report = [&](int code, std::string_view kind, const std::string& msg) {
    if (common.error_json) err << io::error_json(kind, msg, code);
    else err << "error: " << msg << "\n";
    return code;
  };

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  // an --error-json anywhere on the line applies to parse failures too
  common.error_json = std::find(rev.begin(), rev.end(), "--error-json") != rev.end();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return success;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return success;
  } catch (const CLI::CallForVersion&) {
    out << io::tool_version() << "\n";
    return success;
  } catch (const CLI::ParseError& e) {
    return report(usage, "usage", e.what());
  }

  try {
    if (c_synth->parsed()) cmd_synth(synth, out);
    else if (c_cl->parsed()) cmd_centerline(cl, out);
    else if (c_fit->parsed()) cmd_fit(fit, out);
    else if (c_co->parsed()) cmd_coords(co, out);
    else if (c_res->parsed()) cmd_residuals(res, out);
    else if (c_sw->parsed()) cmd_sweep(sw, out, err);
    else if (c_tess->parsed()) cmd_tessellate(tess, out);
    else if (c_reg->parsed()) cmd_coregister(reg, out, err);
    else if (c_pca->parsed()) cmd_pca(pca, out);
    else if (c_ss->parsed()) cmd_synth_shape(ss, out, err);
    else if (c_sf->parsed()) cmd_sample_field(sf, out, err);
    else if (c_at->parsed()) cmd_atlas(at, out);
    else if (c_md->parsed()) cmd_modes(md, out);
    else if (c_th->parsed()) cmd_threshold(th, out);
  } catch (const CLI::ValidationError& e) {
    return report(usage, "usage", e.what());
  } catch (const Error& e) {
    return report(exit_code_for(e.code()), to_string(e.code()), e.what());
  } catch (const fs::filesystem_error& e) {
    return report(input, "input", e.what());
  } catch (const std::exception& e) {
    return report(numerical, "internal", e.what());
  }
  return success;
}

}  // namespace vcs::cli
