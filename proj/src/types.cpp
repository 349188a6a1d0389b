#include "v2icalib/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "v2icalib/errors.hpp"

namespace v2icalib {

std::string_view to_string(Category category) {
  switch (category) {
    case Category::kCar:
      return "car";
    case Category::kTruck:
      return "truck";
    case Category::kVan:
      return "van";
    case Category::kBus:
      return "bus";
    case Category::kPedestrian:
      return "pedestrian";
    case Category::kCyclist:
      return "cyclist";
    case Category::kMotorcycle:
      return "motorcycle";
    case Category::kOther:
      return "other";
  }
  return "other";
}

Category category_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "car") return Category::kCar;
  if (lower == "truck") return Category::kTruck;
  if (lower == "van") return Category::kVan;
  if (lower == "bus") return Category::kBus;
  if (lower == "pedestrian") return Category::kPedestrian;
  if (lower == "cyclist" || lower == "bicycle") return Category::kCyclist;
  if (lower == "motorcycle" || lower == "motorcyclist")
    return Category::kMotorcycle;
  return Category::kOther;
}

double normalize_angle(double radians) {
  double a = std::fmod(radians, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  RigidTransform t;
  t.rotation = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform t;
  t.rotation = rotation.transpose();
  t.translation = -(rotation.transpose() * translation);
  return t;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform t;
  t.rotation = a.rotation * b.rotation;
  t.translation = a.rotation * b.translation + a.translation;
  return t;
}

Eigen::Matrix3d rot_z(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

RigidTransform rotation_z(double yaw) {
  RigidTransform t;
  t.rotation = rot_z(yaw);
  return t;
}

Box3D::Box3D(Category category, const Eigen::Vector3d& center,
             const Eigen::Vector3d& size, double yaw, double confidence,
             std::optional<std::int64_t> track_id)
    : category(category),
      center(center),
      size(size),
      yaw(normalize_angle(yaw)),
      confidence(confidence),
      track_id(track_id) {
  if (!(size.array() > 0.0).all()) {
    throw std::invalid_argument("Box3D: all size components must be > 0");
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("Box3D: confidence must be in [0, 1]");
  }
}

OrientedBox OrientedBox::from_box(const Box3D& box) {
  OrientedBox b;
  b.rotation = rot_z(box.yaw);
  b.center = box.center;
  b.size = box.size;
  return b;
}

}  // namespace v2icalib
