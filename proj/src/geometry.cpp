#include "v2icalib/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace v2icalib {

namespace {

// Sign pattern of each canonical corner, see box_vertices().
constexpr int kCornerSigns[8][3] = {
    {+1, +1, -1}, {+1, -1, -1}, {-1, -1, -1}, {-1, +1, -1},
    {+1, +1, +1}, {+1, -1, +1}, {-1, -1, +1}, {-1, +1, +1},
};

// Faces of the canonical box, vertex indices ordered so normals point
// outward (volume integration relies on this).
constexpr int kBoxFaces[6][4] = {
    {0, 4, 5, 1},  // +x
    {2, 6, 7, 3},  // -x
    {0, 3, 7, 4},  // +y
    {1, 5, 6, 2},  // -y
    {4, 7, 6, 5},  // +z
    {0, 1, 2, 3},  // -z
};

constexpr double kOnPlaneEps = 1e-9;
constexpr double kSliverVolume = 1e-12;

using Polygon = std::vector<Eigen::Vector3d>;

// Convex polyhedron as a set of convex faces with outward orientation.
struct ConvexPolytope {
  std::vector<Polygon> faces;

  bool empty() const { return faces.empty(); }

  static ConvexPolytope from_box(const OrientedBox& box) {
    const auto verts = box_vertices(box);
    ConvexPolytope poly;
    poly.faces.reserve(6);
    for (const auto& face : kBoxFaces) {
      Polygon p;
      p.reserve(4);
      for (int idx : face) p.push_back(verts[idx]);
      poly.faces.push_back(std::move(p));
    }
    return poly;
  }

  // Clips against the half-space n.x <= d. New vertices created on the cut
  // plane are gathered into a cap face so the polyhedron stays closed.
  void clip(const Eigen::Vector3d& n, double d) {
    bool any_outside = false;
    for (const auto& face : faces) {
      for (const auto& v : face) {
        if (n.dot(v) - d > kOnPlaneEps) {
          any_outside = true;
          break;
        }
      }
      if (any_outside) break;
    }
    if (!any_outside) return;  // plane does not cut; avoid a duplicate cap

    std::vector<Polygon> kept;
    std::vector<Eigen::Vector3d> cut_points;
    for (const auto& face : faces) {
      Polygon out;
      const std::size_t sz = face.size();
      for (std::size_t k = 0; k < sz; ++k) {
        const Eigen::Vector3d& a = face[k];
        const Eigen::Vector3d& b = face[(k + 1) % sz];
        const double da = n.dot(a) - d;
        const double db = n.dot(b) - d;
        if (da <= kOnPlaneEps) {
          out.push_back(a);
          if (std::abs(da) <= kOnPlaneEps) cut_points.push_back(a);
        }
        if ((da < -kOnPlaneEps && db > kOnPlaneEps) ||
            (da > kOnPlaneEps && db < -kOnPlaneEps)) {
          const double t = da / (da - db);
          Eigen::Vector3d p = a + t * (b - a);
          out.push_back(p);
          cut_points.push_back(p);
        }
      }
      if (out.size() >= 3) kept.push_back(std::move(out));
    }
    faces = std::move(kept);

    // Cap face: order the cut points by angle around their centroid.
    if (cut_points.size() < 3) return;
    Polygon cap;
    for (const auto& p : cut_points) {
      bool dup = false;
      for (const auto& q : cap) {
        if ((p - q).squaredNorm() < 1e-16) {
          dup = true;
          break;
        }
      }
      if (!dup) cap.push_back(p);
    }
    if (cap.size() < 3) return;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : cap) centroid += p;
    centroid /= static_cast<double>(cap.size());
    // (u, v, n) right-handed, so CCW-in-(u,v) yields outward normal +n.
    Eigen::Vector3d u = n.unitOrthogonal();
    Eigen::Vector3d v = n.cross(u);
    std::sort(cap.begin(), cap.end(),
              [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                const Eigen::Vector3d pa = a - centroid;
                const Eigen::Vector3d pb = b - centroid;
                return std::atan2(v.dot(pa), u.dot(pa)) <
                       std::atan2(v.dot(pb), u.dot(pb));
              });
    faces.push_back(std::move(cap));
  }

  // Signed volume via tetrahedral decomposition about a reference vertex.
  double volume() const {
    if (faces.empty()) return 0.0;
    const Eigen::Vector3d ref = faces.front().front();
    double six_vol = 0.0;
    for (const auto& face : faces) {
      const Eigen::Vector3d a = face[0] - ref;
      for (std::size_t k = 1; k + 1 < face.size(); ++k) {
        const Eigen::Vector3d b = face[k] - ref;
        const Eigen::Vector3d c = face[k + 1] - ref;
        six_vol += a.dot(b.cross(c));
      }
    }
    return six_vol / 6.0;
  }
};

}  // namespace

std::array<Eigen::Vector3d, 8> box_vertices(const OrientedBox& box) {
  std::array<Eigen::Vector3d, 8> verts;
  const Eigen::Vector3d half = 0.5 * box.size;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector3d local(kCornerSigns[k][0] * half.x(),
                                kCornerSigns[k][1] * half.y(),
                                kCornerSigns[k][2] * half.z());
    verts[k] = box.rotation * local + box.center;
  }
  return verts;
}

std::array<Eigen::Vector3d, 8> box_vertices(const Box3D& box) {
  return box_vertices(OrientedBox::from_box(box));
}

OrientedBox apply_transform(const RigidTransform& t, const Box3D& box) {
  OrientedBox b;
  b.rotation = t.rotation * rot_z(box.yaw);
  b.center = t.apply(box.center);
  b.size = box.size;
  return b;
}

OrientedBox apply_transform(const RigidTransform& t, const OrientedBox& box) {
  OrientedBox b;
  b.rotation = t.rotation * box.rotation;
  b.center = t.apply(box.center);
  b.size = box.size;
  return b;
}

bool contains(const OrientedBox& box, const Eigen::Vector3d& p) {
  const Eigen::Vector3d local = box.rotation.transpose() * (p - box.center);
  return (local.array().abs() <= 0.5 * box.size.array()).all();
}

double iou_3d(const OrientedBox& a, const OrientedBox& b) {
  // Disjointness certificate: bounding spheres do not touch.
  const double reach = a.half_diagonal() + b.half_diagonal();
  if ((a.center - b.center).squaredNorm() > reach * reach) return 0.0;

  ConvexPolytope poly = ConvexPolytope::from_box(a);
  for (int axis = 0; axis < 3 && !poly.empty(); ++axis) {
    const Eigen::Vector3d n = b.rotation.col(axis);
    const double offset = n.dot(b.center);
    const double half = 0.5 * b.size[axis];
    poly.clip(n, offset + half);
    if (poly.empty()) break;
    poly.clip(-n, -(offset - half));
  }
  if (poly.empty()) return 0.0;

  const double va = a.volume();
  const double vb = b.volume();
  double vi = std::clamp(poly.volume(), 0.0, std::min(va, vb));
  if (vi < kSliverVolume) return 0.0;
  return std::clamp(vi / (va + vb - vi), 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  return iou_3d(OrientedBox::from_box(a), OrientedBox::from_box(b));
}

}  // namespace v2icalib
