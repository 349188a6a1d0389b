#ifndef V2ICALIB_GEOMETRY_HPP
#define V2ICALIB_GEOMETRY_HPP

#include <array>

#include "v2icalib/types.hpp"

namespace v2icalib {

/// Index permutations of the canonical vertex sequence under heading
/// relabelings. flipped[k] = canonical[perm[k]].
inline constexpr std::array<int, 8> kVertexPermYawPi = {2, 3, 0, 1, 6, 7, 4, 5};
inline constexpr std::array<int, 8> kVertexPermYawHalfPi = {3, 0, 1, 2,
                                                            7, 4, 5, 6};
inline constexpr std::array<int, 8> kVertexPermYawNegHalfPi = {1, 2, 3, 0,
                                                               5, 6, 7, 4};

/**
 * @brief The 8 box corners in a fixed canonical order.
 *
 * Local-frame corners (+-l/2, +-w/2, +-h/2) are enumerated as
 *   (+,+,-), (+,-,-), (-,-,-), (-,+,-), (+,+,+), (+,-,+), (-,-,+), (-,+,+)
 * then rotated and translated into the box's frame. Downstream
 * correspondence hypotheses are defined as reorderings of this sequence,
 * so the order must not change.
 */
std::array<Eigen::Vector3d, 8> box_vertices(const Box3D& box);
std::array<Eigen::Vector3d, 8> box_vertices(const OrientedBox& box);

/// Transforms a box: rotation becomes R * Rz(yaw), center becomes R*c + t.
OrientedBox apply_transform(const RigidTransform& t, const Box3D& box);
OrientedBox apply_transform(const RigidTransform& t, const OrientedBox& box);

/// True if @p p lies inside (or on) @p box.
bool contains(const OrientedBox& box, const Eigen::Vector3d& p);

/**
 * @brief Exact 3D intersection-over-union of two arbitrarily oriented boxes.
 *
 * Clips box a's polyhedron by box b's six half-spaces and integrates the
 * intersection volume, so roll/pitch introduced by extrinsic transforms is
 * handled exactly (no BEV approximation). Short-circuits to 0 when the
 * center distance exceeds half the sum of the box diagonals. Intersection
 * volumes below 1e-12 m^3 count as 0.
 */
double iou_3d(const OrientedBox& a, const OrientedBox& b);
double iou_3d(const Box3D& a, const Box3D& b);

}  // namespace v2icalib

#endif  // V2ICALIB_GEOMETRY_HPP
