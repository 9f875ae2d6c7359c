#include "vcs/io/documents.hpp"

#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "vcs/io/mesh_io.hpp"

namespace vcs::io {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::parse, msg); }

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid JSON at byte " << e.byte << ": " << e.what();
    bad(msg.str());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where,
                bool strict) {
  if (!j.is_object()) bad(where + " must be an object");
  if (!strict) return;
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) bad("unknown field '" + key + "' in " + where);
  }
}

const json& at(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) bad("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return at(j, key, where).get<T>();
  } catch (const json::type_error&) {
    bad("field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

void check_header(const json& j, const char* schema) {
  if (!j.is_object()) bad(std::string(schema) + " document must be a JSON object");
  const auto name = get<std::string>(j, "schema", "document");
  if (name != schema) bad("expected schema '" + std::string(schema) + "', found '" + name + "'");
  const int version = get<int>(j, "version", "document");
  if (version > kSchemaVersion)
    bad("document version " + std::to_string(version) + " is newer than supported version " +
        std::to_string(kSchemaVersion));
  if (version < 1) bad("invalid document version " + std::to_string(version));
  if (j.contains("units") && get<std::string>(j, "units", "document") != "mm")
    bad("only millimetre units are supported");
}

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 to_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where + " must be an array of 3 numbers");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::type_error&) {
    bad(where + " must be an array of 3 numbers");
  }
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vector(const json& j, const std::string& where) {
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const json::type_error&) {
    bad(where + " must be an array of numbers");
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json pca_json(const PrincipalComponents& pc) {
  json modes = json::array();
  for (Eigen::Index k = 0; k < pc.modes.cols(); ++k) modes.push_back(vector_json(pc.modes.col(k)));
  return {{"n_samples", pc.n_samples},
          {"mean", vector_json(pc.mean)},
          {"variances", vector_json(pc.variances)},
          {"modes", modes}};
}

PrincipalComponents to_pca(const json& j, const std::string& where) {
  PrincipalComponents pc;
  pc.n_samples = get<int>(j, "n_samples", where);
  pc.mean = to_vector(at(j, "mean", where), where + ".mean");
  pc.variances = to_vector(at(j, "variances", where), where + ".variances");
  const auto& modes = at(j, "modes", where);
  if (!modes.is_array() || modes.size() != static_cast<std::size_t>(pc.variances.size()))
    bad(where + ".modes must hold one vector per variance");
  pc.modes.resize(pc.mean.size(), pc.variances.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto col = to_vector(modes[k], where + ".modes");
    if (col.size() != pc.mean.size()) bad(where + ".modes[" + std::to_string(k) + "] has the wrong length");
    pc.modes.col(static_cast<Eigen::Index>(k)) = col;
  }
  return pc;
}

json provenance_json(const Provenance& p) {
  return {{"source_mesh_hash", p.source_mesh_hash}, {"tool_version", p.tool_version}};
}

Provenance to_provenance(const json& j, bool strict) {
  check_keys(j, {"source_mesh_hash", "tool_version", "L", "K", "R"}, "provenance", strict);
  Provenance p;
  p.source_mesh_hash = get_or<std::string>(j, "source_mesh_hash", "", "provenance");
  p.tool_version = get_or<std::string>(j, "tool_version", "", "provenance");
  return p;
}

json curve_json(const SplineCurve3& c) {
  json pts = json::array();
  for (const auto& p : c.coefficients()) pts.push_back(vec3(p));
  return {{"degree", kDegree}, {"spans", c.spans()}, {"control_points", pts}};
}

SplineCurve3 to_curve(const json& j, bool strict) {
  check_keys(j, {"degree", "spans", "control_points"}, "centerline", strict);
  if (get_or<int>(j, "degree", kDegree, "centerline") != kDegree) bad("only cubic centerlines are supported");
  const int spans = get<int>(j, "spans", "centerline");
  const auto& pts = at(j, "control_points", "centerline");
  if (!pts.is_array()) bad("centerline.control_points must be an array");
  std::vector<Vec3> control;
  for (const auto& p : pts) control.push_back(to_vec3(p, "centerline.control_points[]"));
  if (spans < 1 || control.size() != static_cast<std::size_t>(spans + kDegree))
    bad("centerline has " + std::to_string(control.size()) + " control points for " +
        std::to_string(spans) + " spans");
  return {std::move(control), spans};
}

const char* term_name(RadiusTermKind k) { return k == RadiusTermKind::sinusoidal ? "sinusoidal" : "valsalva"; }

}  // namespace

std::string_view tool_version() noexcept { return VCS_VERSION; }

std::string dump_model(const ModelDocument& doc) {
  const auto& m = doc.model;
  const auto& b = m.wall().coefficients();
  json rows = json::array();
  for (Eigen::Index i = 0; i < b.rows(); ++i) rows.push_back(vector_json(b.row(i).transpose()));
  const auto d = m.dims();
  json prov = provenance_json(doc.provenance);
  prov["L"] = d.L;
  prov["K"] = d.K;
  prov["R"] = d.R;
  const json j = {{"schema", "vcs-model"},
                  {"version", kSchemaVersion},
                  {"units", "mm"},
                  {"id", m.id()},
                  {"centerline", curve_json(m.centerline())},
                  {"wall",
                   {{"degree", kDegree},
                    {"spans_tau", d.K},
                    {"spans_theta", d.R},
                    {"coefficients", rows}}},
                  {"frame", {{"v1_0", vec3(m.v1_0())}}},
                  {"provenance", prov}};
  return j.dump(1) + "\n";
}

ModelDocument load_model(std::string_view text, bool strict) {
  const json j = parse(text);
  check_header(j, "vcs-model");
  check_keys(j, {"schema", "version", "units", "id", "centerline", "wall", "frame", "provenance"},
             "model", strict);
  SplineCurve3 curve = to_curve(at(j, "centerline", "model"), strict);
  const auto& w = at(j, "wall", "model");
  check_keys(w, {"degree", "spans_tau", "spans_theta", "coefficients"}, "wall", strict);
  if (get_or<int>(w, "degree", kDegree, "wall") != kDegree) bad("only cubic walls are supported");
  const int K = get<int>(w, "spans_tau", "wall");
  const int R = get<int>(w, "spans_theta", "wall");
  const auto& rows = at(w, "coefficients", "wall");
  if (K < 1 || R < 3 || !rows.is_array() || rows.size() != static_cast<std::size_t>(K + kDegree))
    bad("wall coefficient matrix does not match spans_tau=" + std::to_string(K));
  Eigen::MatrixXd b(K + kDegree, R);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = to_vector(rows[i], "wall.coefficients");
    if (row.size() != R) bad("wall row " + std::to_string(i) + " does not have spans_theta=" + std::to_string(R) + " entries");
    b.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  const auto& f = at(j, "frame", "model");
  check_keys(f, {"v1_0"}, "frame", strict);
  const Vec3 v1 = to_vec3(at(f, "v1_0", "frame"), "frame.v1_0");
  Provenance prov;
  if (j.contains("provenance")) prov = to_provenance(j["provenance"], strict);
  return {VesselModel(std::move(curve), BivariateSpline(std::move(b), K, R), v1,
                      get_or<std::string>(j, "id", "", "model")),
          prov};
}

void write_model(const std::filesystem::path& path, const ModelDocument& doc) {
  write_file(path, dump_model(doc));
}

ModelDocument read_model(const std::filesystem::path& path, bool strict) {
  try {
    return load_model(read_file(path), strict);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse) fail(ErrorCode::parse, path.string() + ": " + e.what());
    throw;
  }
}

std::string dump_centerline(const CenterlineDocument& doc) {
  const json j = {{"schema", "vcs-centerline"},
                  {"version", kSchemaVersion},
                  {"units", "mm"},
                  {"centerline", curve_json(doc.curve)},
                  {"frame", {{"v1_0", vec3(doc.v1_0)}}},
                  {"extraction",
                   {{"voxel", doc.voxel},
                    {"pA", vec3(doc.pA)},
                    {"pB", vec3(doc.pB)},
                    {"min_clearance", doc.min_clearance}}},
                  {"provenance", provenance_json(doc.provenance)}};
  return j.dump(1) + "\n";
}

CenterlineDocument load_centerline(std::string_view text, bool strict) {
  const json j = parse(text);
  check_header(j, "vcs-centerline");
  check_keys(j, {"schema", "version", "units", "centerline", "frame", "extraction", "provenance"},
             "centerline document", strict);
  CenterlineDocument doc{to_curve(at(j, "centerline", "document"), strict), Vec3::UnitX(), 0.5,
                         Vec3::Zero(), Vec3::Zero(), 0.0, {}};
  const auto& f = at(j, "frame", "document");
  check_keys(f, {"v1_0"}, "frame", strict);
  doc.v1_0 = to_vec3(at(f, "v1_0", "frame"), "frame.v1_0");
  if (j.contains("extraction")) {
    const auto& e = j["extraction"];
    check_keys(e, {"voxel", "pA", "pB", "min_clearance"}, "extraction", strict);
    doc.voxel = get_or<double>(e, "voxel", 0.5, "extraction");
    if (e.contains("pA")) doc.pA = to_vec3(e["pA"], "extraction.pA");
    if (e.contains("pB")) doc.pB = to_vec3(e["pB"], "extraction.pB");
    doc.min_clearance = get_or<double>(e, "min_clearance", 0.0, "extraction");
  }
  if (j.contains("provenance")) doc.provenance = to_provenance(j["provenance"], strict);
  return doc;
}

std::string dump_cohort(const CohortModel& cohort) {
  json j = {{"schema", "vcs-cohort"},
            {"version", kSchemaVersion},
            {"units", "mm"},
            {"dims", {{"L", cohort.dims.L}, {"K", cohort.dims.K}, {"R", cohort.dims.R}}},
            {"layout", "control points (x, y, z) in order, then wall coefficients row by row"},
            {"v1_0", vec3(cohort.v1_0)}};
  j.update(pca_json(cohort.pca));
  return j.dump(1) + "\n";
}

CohortModel load_cohort(std::string_view text, bool strict) {
  const json j = parse(text);
  check_header(j, "vcs-cohort");
  check_keys(j, {"schema", "version", "units", "dims", "layout", "v1_0", "n_samples", "mean",
                 "variances", "modes"},
             "cohort", strict);
  CohortModel c;
  const auto& d = at(j, "dims", "cohort");
  check_keys(d, {"L", "K", "R"}, "dims", strict);
  c.dims = {get<int>(d, "L", "dims"), get<int>(d, "K", "dims"), get<int>(d, "R", "dims")};
  c.v1_0 = to_vec3(at(j, "v1_0", "cohort"), "v1_0");
  c.pca = to_pca(j, "cohort");
  if (static_cast<std::size_t>(c.pca.mean.size()) != c.dims.feature_length())
    fail(ErrorCode::layout, "cohort mean length does not match its (L, K, R)");
  return c;
}

std::string dump_atlas(const FieldAtlas& atlas) {
  json j = {{"schema", "vcs-atlas"},
            {"version", kSchemaVersion},
            {"grid",
             {{"n_tau", atlas.grid.n_tau()},
              {"n_theta", atlas.grid.n_theta()},
              {"n_rho", atlas.grid.n_rho()}}},
            {"wall_only", atlas.wall_only},
            {"components", atlas.components},
            {"name", atlas.name},
            {"field_units", atlas.units}};
  j.update(pca_json(atlas.pca));
  return j.dump(1) + "\n";
}

FieldAtlas load_atlas(std::string_view text, bool strict) {
  const json j = parse(text);
  check_header(j, "vcs-atlas");
  check_keys(j, {"schema", "version", "units", "grid", "wall_only", "components", "name",
                 "field_units", "n_samples", "mean", "variances", "modes"},
             "atlas", strict);
  const auto& g = at(j, "grid", "atlas");
  check_keys(g, {"n_tau", "n_theta", "n_rho"}, "grid", strict);
  FieldAtlas a;
  a.grid = MeasurementGrid(get<int>(g, "n_tau", "grid"), get<int>(g, "n_theta", "grid"),
                           get<int>(g, "n_rho", "grid"));
  a.wall_only = get_or<bool>(j, "wall_only", false, "atlas");
  a.components = get<int>(j, "components", "atlas");
  a.name = get_or<std::string>(j, "name", "", "atlas");
  a.units = get_or<std::string>(j, "field_units", "", "atlas");
  a.pca = to_pca(j, "atlas");
  const std::size_t nodes = a.wall_only ? a.grid.wall_subset().size() : a.grid.size();
  if (static_cast<std::size_t>(a.pca.mean.size()) != nodes * static_cast<std::size_t>(a.components))
    fail(ErrorCode::layout, "atlas mean length does not match its grid");
  return a;
}

std::string dump_transforms(const std::vector<std::string>& ids, const Coregistration& result) {
  json items = json::array();
  for (std::size_t k = 0; k < result.transforms.size(); ++k) {
    const auto& T = result.transforms[k];
    json rot = json::array();
    for (int r = 0; r < 3; ++r) rot.push_back(vector_json(T.rotation.row(r).transpose()));
    items.push_back({{"id", k < ids.size() ? ids[k] : std::to_string(k)},
                     {"rotation", rot},
                     {"translation", vec3(T.translation)}});
  }
  const json j = {{"schema", "vcs-transforms"},
                  {"version", kSchemaVersion},
                  {"units", "mm"},
                  {"iterations", result.iterations},
                  {"converged", result.converged},
                  {"objective", result.objective},
                  {"transforms", items}};
  return j.dump(1) + "\n";
}

std::string dump_synthetic_spec(const SyntheticSpec& s) {
  const auto& c = s.centerline;
  json cl = {{"kind", to_string(c.kind)}};
  switch (c.kind) {
    case CenterlineKind::line: cl["length"] = c.length; break;
    case CenterlineKind::arc:
      cl["radius"] = c.arc_radius;
      cl["angle"] = c.arc_angle;
      break;
    case CenterlineKind::helix:
      cl["radius"] = c.helix_radius;
      cl["pitch"] = c.helix_pitch;
      cl["turns"] = c.helix_turns;
      break;
    case CenterlineKind::aorta:
      cl["ascending"] = c.ascending;
      cl["arch_radius"] = c.arch_radius;
      cl["descending"] = c.descending;
      break;
  }
  json terms = json::array();
  for (const auto& t : s.terms) {
    json tj = {{"kind", term_name(t.kind)}, {"amplitude", t.amplitude}};
    if (t.kind == RadiusTermKind::sinusoidal) {
      tj["m_tau"] = t.m_tau;
      tj["m_theta"] = t.m_theta;
    } else {
      tj["center"] = t.center;
      tj["width"] = t.width;
    }
    terms.push_back(tj);
  }
  const json j = {{"centerline", cl},
                  {"radius", {{"base", s.base_radius}, {"terms", terms}}},
                  {"tessellation", {{"n_tau", s.n_tau}, {"n_theta", s.n_theta}}},
                  {"noise", s.noise},
                  {"seed", s.seed},
                  {"frame_angle", s.frame_angle}};
  return j.dump(1) + "\n";
}

SyntheticSpec load_synthetic_spec(std::string_view text) {
  const json j = parse(text);
  check_keys(j, {"centerline", "radius", "tessellation", "noise", "seed", "frame_angle"}, "spec", true);
  SyntheticSpec s;
  const auto& cl = at(j, "centerline", "spec");
  auto& c = s.centerline;
  c.kind = parse_centerline_kind(get<std::string>(cl, "kind", "centerline"));
  switch (c.kind) {
    case CenterlineKind::line:
      check_keys(cl, {"kind", "length"}, "centerline", true);
      c.length = get_or<double>(cl, "length", c.length, "centerline");
      break;
    case CenterlineKind::arc:
      check_keys(cl, {"kind", "radius", "angle"}, "centerline", true);
      c.arc_radius = get_or<double>(cl, "radius", c.arc_radius, "centerline");
      c.arc_angle = get_or<double>(cl, "angle", c.arc_angle, "centerline");
      break;
    case CenterlineKind::helix:
      check_keys(cl, {"kind", "radius", "pitch", "turns"}, "centerline", true);
      c.helix_radius = get_or<double>(cl, "radius", c.helix_radius, "centerline");
      c.helix_pitch = get_or<double>(cl, "pitch", c.helix_pitch, "centerline");
      c.helix_turns = get_or<double>(cl, "turns", c.helix_turns, "centerline");
      break;
    case CenterlineKind::aorta:
      check_keys(cl, {"kind", "ascending", "arch_radius", "descending"}, "centerline", true);
      c.ascending = get_or<double>(cl, "ascending", c.ascending, "centerline");
      c.arch_radius = get_or<double>(cl, "arch_radius", c.arch_radius, "centerline");
      c.descending = get_or<double>(cl, "descending", c.descending, "centerline");
      break;
  }
  if (j.contains("radius")) {
    const auto& r = j["radius"];
    check_keys(r, {"base", "terms"}, "radius", true);
    s.base_radius = get_or<double>(r, "base", s.base_radius, "radius");
    if (r.contains("terms")) {
      if (!r["terms"].is_array()) bad("radius.terms must be an array");
      for (const auto& tj : r["terms"]) {
        RadiusTerm t;
        const auto kind = get<std::string>(tj, "kind", "radius term");
        if (kind == "sinusoidal") {
          check_keys(tj, {"kind", "amplitude", "m_tau", "m_theta"}, "radius term", true);
          t.kind = RadiusTermKind::sinusoidal;
          t.m_tau = get_or<double>(tj, "m_tau", 1.0, "radius term");
          t.m_theta = get_or<double>(tj, "m_theta", 1.0, "radius term");
        } else if (kind == "valsalva" || kind == "valsalva-bump") {
          check_keys(tj, {"kind", "amplitude", "center", "width"}, "radius term", true);
          t.kind = RadiusTermKind::valsalva;
          t.center = get_or<double>(tj, "center", t.center, "radius term");
          t.width = get_or<double>(tj, "width", t.width, "radius term");
          if (!(t.width > 0)) fail(ErrorCode::spec, "valsalva width must be positive");
        } else {
          fail(ErrorCode::spec, "unknown radius term '" + kind + "'");
        }
        t.amplitude = get<double>(tj, "amplitude", "radius term");
        s.terms.push_back(t);
      }
    }
  }
  if (j.contains("tessellation")) {
    const auto& t = j["tessellation"];
    check_keys(t, {"n_tau", "n_theta"}, "tessellation", true);
    s.n_tau = get_or<int>(t, "n_tau", s.n_tau, "tessellation");
    s.n_theta = get_or<int>(t, "n_theta", s.n_theta, "tessellation");
  }
  s.noise = get_or<double>(j, "noise", 0.0, "spec");
  s.seed = get_or<std::uint64_t>(j, "seed", 1, "spec");
  s.frame_angle = get_or<double>(j, "frame_angle", 0.0, "spec");
  return s;
}

std::string dump_oracle(const SyntheticVessel& vessel) {
  json verts = json::array();
  for (const auto& v : vessel.vertex_coordinates()) verts.push_back({v.tau, v.theta, v.rho});
  const Frame f0 = vessel.frame(0.0);
  const json j = {{"schema", "vcs-oracle"},
                  {"version", kSchemaVersion},
                  {"units", "mm"},
                  {"spec", json::parse(dump_synthetic_spec(vessel.spec()))},
                  {"length", vessel.length()},
                  {"v1_0", vec3(f0.v1)},
                  {"vertex_coordinates", verts}};
  return j.dump(1) + "\n";
}

std::string dump_residual_report(const ResidualReport& r, const ModelDims& dims) {
  const json j = {{"schema", "vcs-residuals"},
                  {"version", kSchemaVersion},
                  {"units", "mm"},
                  {"dims", {{"L", dims.L}, {"K", dims.K}, {"R", dims.R}}},
                  {"count", r.residual.size()},
                  {"excluded", r.excluded},
                  {"mean", r.mean},
                  {"p75", r.p75},
                  {"max", r.max},
                  {"nearest_mean", r.nearest_mean},
                  {"nearest_max", r.nearest_max},
                  {"histogram", {{"edges", r.histogram.edges}, {"counts", r.histogram.counts}}},
                  {"vertex", r.vertex},
                  {"residual", r.residual}};
  return j.dump(1) + "\n";
}

std::string error_json(std::string_view code, std::string_view message, int exit_code) {
  const json j = {{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}};
  return j.dump() + "\n";
}

}  // namespace vcs::io
