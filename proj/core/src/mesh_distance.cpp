#include "vcs/mesh_distance.hpp"

#include <algorithm>
#include <numeric>

#include "vcs/error.hpp"

namespace vcs {

namespace {
constexpr int kLeafSize = 4;
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh, std::span<const int> faces) {
  slot_of_face_.assign(mesh.faces.size(), -1);
  auto add = [&](int f) {
    const auto& tri = mesh.faces[static_cast<std::size_t>(f)];
    tris_.push_back({mesh.vertices[static_cast<std::size_t>(tri[0])],
                     mesh.vertices[static_cast<std::size_t>(tri[1])],
                     mesh.vertices[static_cast<std::size_t>(tri[2])], f});
  };
  if (faces.empty()) {
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) add(static_cast<int>(f));
  } else {
    for (int f : faces) add(f);
  }
  if (tris_.empty()) fail(ErrorCode::input, "distance query structure needs at least one triangle");
  nodes_.reserve(2 * tris_.size() / kLeafSize + 2);
  build(0, static_cast<int>(tris_.size()));
  for (std::size_t i = 0; i < tris_.size(); ++i)
    slot_of_face_[static_cast<std::size_t>(tris_[i].face)] = static_cast<int>(i);
}

int TriangleBvh::build(int begin, int end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  Vec3 clo = node.lo;
  Vec3 chi = node.hi;
  for (int i = begin; i < end; ++i) {
    const auto& t = tris_[static_cast<std::size_t>(i)];
    node.lo = node.lo.cwiseMin(t.a).cwiseMin(t.b).cwiseMin(t.c);
    node.hi = node.hi.cwiseMax(t.a).cwiseMax(t.b).cwiseMax(t.c);
    const Vec3 centroid = (t.a + t.b + t.c) / 3.0;
    clo = clo.cwiseMin(centroid);
    chi = chi.cwiseMax(centroid);
  }
  if (end - begin <= kLeafSize) {
    node.left = begin;
    node.count = end - begin;
    nodes_[static_cast<std::size_t>(index)] = node;
    return index;
  }
  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(tris_.begin() + begin, tris_.begin() + mid, tris_.begin() + end,
                   [axis](const Tri& x, const Tri& y) {
                     return (x.a[axis] + x.b[axis] + x.c[axis]) < (y.a[axis] + y.b[axis] + y.c[axis]);
                   });
  node.left = build(begin, mid);
  node.right = build(mid, end);
  nodes_[static_cast<std::size_t>(index)] = node;
  return index;
}

double TriangleBvh::box_distance_sq(const Node& n, const Vec3& p) {
  const Vec3 d = (n.lo - p).cwiseMax(p - n.hi).cwiseMax(0.0);
  return d.squaredNorm();
}

TriangleBvh::Hit TriangleBvh::closest(const Vec3& p, int hint_face) const {
  double best_sq = std::numeric_limits<double>::infinity();
  int best_slot = -1;
  Vec3 best_point = Vec3::Zero();
  auto test = [&](int slot) {
    const auto& t = tris_[static_cast<std::size_t>(slot)];
    const Vec3 q = closest_point_on_triangle(p, t.a, t.b, t.c);
    const double d = (q - p).squaredNorm();
    if (d < best_sq) {
      best_sq = d;
      best_slot = slot;
      best_point = q;
    }
  };
  if (hint_face >= 0 && static_cast<std::size_t>(hint_face) < slot_of_face_.size() &&
      slot_of_face_[static_cast<std::size_t>(hint_face)] >= 0)
    test(slot_of_face_[static_cast<std::size_t>(hint_face)]);

  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[static_cast<std::size_t>(stack[--top])];
    if (box_distance_sq(n, p) >= best_sq) continue;
    if (n.right < 0) {
      for (int i = 0; i < n.count; ++i) test(n.left + i);
      continue;
    }
    const double dl = box_distance_sq(nodes_[static_cast<std::size_t>(n.left)], p);
    const double dr = box_distance_sq(nodes_[static_cast<std::size_t>(n.right)], p);
    // push the farther child first so the nearer one is visited next
    if (dl < dr) {
      if (dr < best_sq) stack[top++] = n.right;
      if (dl < best_sq) stack[top++] = n.left;
    } else {
      if (dl < best_sq) stack[top++] = n.left;
      if (dr < best_sq) stack[top++] = n.right;
    }
  }
  Hit hit;
  if (best_slot >= 0) {
    hit.distance = std::sqrt(best_sq);
    hit.face = tris_[static_cast<std::size_t>(best_slot)].face;
    hit.point = best_point;
  }
  return hit;
}

}  // namespace vcs
