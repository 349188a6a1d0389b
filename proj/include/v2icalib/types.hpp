#ifndef V2ICALIB_TYPES_HPP
#define V2ICALIB_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace v2icalib {

/// Object class of a detection box. Unknown labels map to kOther.
enum class Category : std::uint8_t {
  kCar,
  kTruck,
  kVan,
  kBus,
  kPedestrian,
  kCyclist,
  kMotorcycle,
  kOther,
};

std::string_view to_string(Category category);

/// Case-insensitive parse; anything unrecognized becomes Category::kOther.
Category category_from_string(std::string_view name);

/// Wraps an angle to (-pi, pi].
double normalize_angle(double radians);

/**
 * @brief SE(3) rigid transform: x -> rotation * x + translation.
 *
 * Infrastructure-to-vehicle extrinsics are expressed with this type.
 * rotation is a proper rotation (orthonormal, det = +1).
 */
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  /// Builds from a 4x4 homogeneous matrix. No rigidity validation here;
  /// loaders that ingest untrusted matrices validate before calling.
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);

  Eigen::Matrix4d matrix() const;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  RigidTransform inverse() const;
};

/// compose(a, b): first apply b, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

/// Pure rotation about +z by @p yaw radians.
RigidTransform rotation_z(double yaw);

/// 3x3 rotation about +z.
Eigen::Matrix3d rot_z(double yaw);

/**
 * @brief A category-labeled oriented 3D detection box in one sensor frame.
 *
 * size = (length, width, height) along the box's local x/y/z axes.
 * The constructor normalizes yaw to (-pi, pi] and rejects invalid fields.
 */
struct Box3D {
  Category category = Category::kCar;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double yaw = 0.0;
  double confidence = 1.0;
  std::optional<std::int64_t> track_id;

  Box3D() = default;
  Box3D(Category category, const Eigen::Vector3d& center,
        const Eigen::Vector3d& size, double yaw, double confidence = 1.0,
        std::optional<std::int64_t> track_id = std::nullopt);

  double volume() const { return size.x() * size.y() * size.z(); }
};

/**
 * @brief A box with a full 3x3 orientation.
 *
 * Box3D is yaw-only; applying an arbitrary rigid transform can introduce
 * roll/pitch, which this type carries.
 */
struct OrientedBox {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();

  static OrientedBox from_box(const Box3D& box);

  double volume() const { return size.x() * size.y() * size.z(); }

  /// Half of the box diagonal; bounding-sphere radius.
  double half_diagonal() const { return 0.5 * size.norm(); }
};

/**
 * @brief Ordered point set where every consecutive run of 8 points is the
 * vertex list of one detection box.
 */
struct VertexCloud {
  std::vector<Eigen::Vector3d> points;

  std::size_t group_count() const { return points.size() / 8; }
};

/// One endpoint's detections for a single timestamp.
struct Scene {
  std::vector<Box3D> boxes;
  std::string frame_id;
  std::optional<double> timestamp;
};

}  // namespace v2icalib

#endif  // V2ICALIB_TYPES_HPP
