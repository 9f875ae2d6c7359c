#include "vcs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "vcs/error.hpp"

namespace vcs {

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

Vec3 TriangleMesh::vertex_centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& v : vertices) c += v;
  return vertices.empty() ? c : Vec3(c / static_cast<double>(vertices.size()));
}

TriangleMesh TriangleMesh::transformed(const RigidTransform& T) const {
  TriangleMesh out = *this;
  for (auto& v : out.vertices) v = T.apply(v);
  return out;
}

namespace {

std::map<Edge, int> edge_use(const TriangleMesh& mesh) {
  std::map<Edge, int> use;
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      ++use[{std::min(a, b), std::max(a, b)}];
    }
  return use;
}

std::string list_edges(const std::vector<Edge>& edges, std::size_t limit = 16) {
  std::string s;
  for (std::size_t i = 0; i < edges.size() && i < limit; ++i) {
    if (i) s += ", ";
    s += "(" + std::to_string(edges[i].first) + "," + std::to_string(edges[i].second) + ")";
  }
  if (edges.size() > limit) s += ", ... (" + std::to_string(edges.size()) + " total)";
  return s;
}

}  // namespace

std::vector<Edge> boundary_edges(const TriangleMesh& mesh) {
  std::vector<Edge> out;
  for (const auto& [e, n] : edge_use(mesh))
    if (n == 1) out.push_back(e);
  return out;
}

std::vector<Edge> nonmanifold_edges(const TriangleMesh& mesh) {
  std::vector<Edge> out;
  for (const auto& [e, n] : edge_use(mesh))
    if (n > 2) out.push_back(e);
  return out;
}

std::vector<std::vector<int>> boundary_loops(const TriangleMesh& mesh) {
  const auto edges = boundary_edges(mesh);
  std::unordered_map<int, std::vector<int>> adj;
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<Edge> bad;
  for (const auto& [v, nb] : adj)
    if (nb.size() != 2)
      for (int w : nb) bad.emplace_back(std::min(v, w), std::max(v, w));
  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    fail(ErrorCode::topology, "boundary edges do not form simple loops: " + list_edges(bad));
  }

  std::vector<int> starts;
  for (const auto& [v, nb] : adj) starts.push_back(v);
  std::sort(starts.begin(), starts.end());
  std::unordered_map<int, bool> seen;
  std::vector<std::vector<int>> loops;
  for (int s : starts) {
    if (seen[s]) continue;
    std::vector<int> loop{s};
    seen[s] = true;
    int prev = s;
    int cur = std::min(adj[s][0], adj[s][1]);
    while (cur != s) {
      loop.push_back(cur);
      seen[cur] = true;
      const auto& nb = adj[cur];
      const int next = nb[0] == prev ? nb[1] : nb[0];
      prev = cur;
      cur = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

long euler_characteristic(const TriangleMesh& mesh) {
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(edge_use(mesh).size()) +
         static_cast<long>(mesh.faces.size());
}

CappedMesh cap_boundaries(const TriangleMesh& mesh) {
  CappedMesh out;
  out.mesh = mesh;
  out.is_cap.assign(mesh.faces.size(), false);
  for (const auto& loop : boundary_loops(mesh)) {
    Vec3 c = Vec3::Zero();
    for (int v : loop) c += mesh.vertices[static_cast<std::size_t>(v)];
    c /= static_cast<double>(loop.size());
    const int center = static_cast<int>(out.mesh.vertices.size());
    out.mesh.vertices.push_back(c);
    out.loop_centroids.push_back(c);
    for (std::size_t i = 0; i < loop.size(); ++i) {
      out.mesh.faces.push_back({center, loop[(i + 1) % loop.size()], loop[i]});
      out.is_cap.push_back(true);
    }
  }
  const auto open = boundary_edges(out.mesh);
  auto nm = nonmanifold_edges(out.mesh);
  if (!open.empty() || !nm.empty()) {
    auto bad = open;
    bad.insert(bad.end(), nm.begin(), nm.end());
    fail(ErrorCode::topology, "mesh is not watertight after capping; offending edges: " +
                                  list_edges(bad));
  }
  return out;
}

TriangleMesh weld(const TriangleMesh& mesh, double tolerance) {
  struct KeyHash {
    std::size_t operator()(const std::array<long long, 3>& k) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
      return h;
    }
  };
  const double cell = std::max(tolerance, 1e-300);
  std::unordered_map<std::array<long long, 3>, std::vector<int>, KeyHash> grid;
  TriangleMesh out;
  std::vector<int> remap(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    const std::array<long long, 3> key{static_cast<long long>(std::floor(p.x() / cell)),
                                       static_cast<long long>(std::floor(p.y() / cell)),
                                       static_cast<long long>(std::floor(p.z() / cell))};
    int found = -1;
    for (long long dx = -1; dx <= 1 && found < 0; ++dx)
      for (long long dy = -1; dy <= 1 && found < 0; ++dy)
        for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find({key[0] + dx, key[1] + dy, key[2] + dz});
          if (it == grid.end()) continue;
          for (int j : it->second)
            if ((out.vertices[static_cast<std::size_t>(j)] - p).norm() <= tolerance) {
              found = j;
              break;
            }
        }
    if (found < 0) {
      found = static_cast<int>(out.vertices.size());
      out.vertices.push_back(p);
      grid[key].push_back(found);
    }
    remap[i] = found;
  }
  for (const auto& f : mesh.faces) {
    const std::array<int, 3> g{remap[static_cast<std::size_t>(f[0])],
                               remap[static_cast<std::size_t>(f[1])],
                               remap[static_cast<std::size_t>(f[2])]};
    if (g[0] != g[1] && g[1] != g[2] && g[0] != g[2]) out.faces.push_back(g);
  }
  return out;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace vcs
