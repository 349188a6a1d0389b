#include "v2icalib/affinity.hpp"

#include <cmath>
#include <numbers>

#include "v2icalib/errors.hpp"

namespace v2icalib {

std::string_view to_string(AffinityKind kind) {
  switch (kind) {
    case AffinityKind::kCoreCategory:
      return "core_category";
    case AffinityKind::kCoreOnly:
      return "core_only";
    case AffinityKind::kAngleCategory:
      return "angle_category";
    case AffinityKind::kLengthCategory:
      return "length_category";
    case AffinityKind::kLengthAngleCategory:
      return "length_angle_category";
  }
  return "core_category";
}

AffinityKind affinity_kind_from_string(std::string_view name) {
  if (name == "core_category") return AffinityKind::kCoreCategory;
  if (name == "core_only") return AffinityKind::kCoreOnly;
  if (name == "angle_category") return AffinityKind::kAngleCategory;
  if (name == "length_category") return AffinityKind::kLengthCategory;
  if (name == "length_angle_category")
    return AffinityKind::kLengthAngleCategory;
  throw ParseError("unknown affinity kind: " + std::string(name));
}

double overall_iou(std::span<const OrientedBox> infra_in_vehicle_frame,
                   std::span<const OrientedBox> vehicle_boxes) {
  const std::size_t m = infra_in_vehicle_frame.size();
  const std::size_t n = vehicle_boxes.size();
  if (m == 0 || n == 0) return 0.0;
  double sum = 0.0;
  for (const OrientedBox& a : infra_in_vehicle_frame) {
    for (const OrientedBox& b : vehicle_boxes) {
      sum += iou_3d(a, b);
    }
  }
  return sum / static_cast<double>(std::max(m, n));
}

double overall_iou(std::span<const OrientedBox> infra_in_vehicle_frame,
                   std::span<const Box3D> vehicle_boxes) {
  std::vector<OrientedBox> veh;
  veh.reserve(vehicle_boxes.size());
  for (const Box3D& b : vehicle_boxes) veh.push_back(OrientedBox::from_box(b));
  return overall_iou(infra_in_vehicle_frame, veh);
}

std::vector<RigidTransform> hypothesis_extrinsics(const Box3D& b_inf,
                                                  const Box3D& b_veh) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kNearSquare = 0.05;  // meters, |l - w| below this
  const double dyaw = b_veh.yaw - b_inf.yaw;

  std::vector<double> yaws = {dyaw, dyaw + kPi};
  if (std::abs(b_inf.size.x() - b_inf.size.y()) < kNearSquare ||
      std::abs(b_veh.size.x() - b_veh.size.y()) < kNearSquare) {
    yaws.push_back(dyaw + kPi / 2.0);
    yaws.push_back(dyaw - kPi / 2.0);
  }

  std::vector<RigidTransform> out;
  out.reserve(yaws.size());
  for (double yaw : yaws) {
    RigidTransform t;
    t.rotation = rot_z(normalize_angle(yaw));
    t.translation = b_veh.center - t.rotation * b_inf.center;
    out.push_back(t);
  }
  return out;
}

AffinityMatrix core_affinity(const Scene& scene_inf, const Scene& scene_veh,
                             const StrategyConfig& config) {
  if (scene_inf.boxes.empty())
    throw EmptyScene("infrastructure scene has no boxes");
  if (scene_veh.boxes.empty()) throw EmptyScene("vehicle scene has no boxes");

  const Eigen::Index m = static_cast<Eigen::Index>(scene_inf.boxes.size());
  const Eigen::Index n = static_cast<Eigen::Index>(scene_veh.boxes.size());
  const bool mask_categories = config.affinity_kind != AffinityKind::kCoreOnly;

  std::vector<OrientedBox> inf_local;
  inf_local.reserve(static_cast<std::size_t>(m));
  for (const Box3D& b : scene_inf.boxes)
    inf_local.push_back(OrientedBox::from_box(b));
  std::vector<OrientedBox> veh;
  veh.reserve(static_cast<std::size_t>(n));
  for (const Box3D& b : scene_veh.boxes) veh.push_back(OrientedBox::from_box(b));

  AffinityMatrix out(m, n);
  std::vector<OrientedBox> transformed(inf_local.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const Box3D& bi = scene_inf.boxes[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const Box3D& bj = scene_veh.boxes[static_cast<std::size_t>(j)];
      if (mask_categories && bi.category != bj.category) continue;

      double best = -1.0;
      RigidTransform best_t;
      for (const RigidTransform& t : hypothesis_extrinsics(bi, bj)) {
        for (std::size_t k = 0; k < inf_local.size(); ++k)
          transformed[k] = apply_transform(t, inf_local[k]);
        const double score = overall_iou(transformed, veh);
        if (score > best) {
          best = score;
          best_t = t;
        }
      }
      if (config.use_confidence_weighting) best *= bi.confidence * bj.confidence;
      out.values(i, j) = best;
      out.hypothesis(i, j) = best_t;
    }
  }
  return out;
}

AffinityMatrix category_affinity(const Scene& scene_inf,
                                 const Scene& scene_veh,
                                 const StrategyConfig& config) {
  if (scene_inf.boxes.empty())
    throw EmptyScene("infrastructure scene has no boxes");
  if (scene_veh.boxes.empty()) throw EmptyScene("vehicle scene has no boxes");

  const Eigen::Index m = static_cast<Eigen::Index>(scene_inf.boxes.size());
  const Eigen::Index n = static_cast<Eigen::Index>(scene_veh.boxes.size());
  AffinityMatrix out(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Box3D& bi = scene_inf.boxes[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const Box3D& bj = scene_veh.boxes[static_cast<std::size_t>(j)];
      if (bi.category != bj.category) continue;
      out.values(i, j) = config.use_confidence_weighting
                             ? bi.confidence * bj.confidence
                             : 1.0;
    }
  }
  return out;
}

namespace {

void pairwise_edge_features(const Scene& scene, Eigen::MatrixXd& dist,
                            Eigen::MatrixXd& relyaw) {
  const Eigen::Index n = static_cast<Eigen::Index>(scene.boxes.size());
  dist.setZero(n, n);
  relyaw.setZero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Box3D& ba = scene.boxes[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      const Box3D& bb = scene.boxes[static_cast<std::size_t>(b)];
      dist(a, b) = (ba.center - bb.center).norm();
      relyaw(a, b) = normalize_angle(bb.yaw - ba.yaw);
    }
  }
}

}  // namespace

EdgeAffinity::EdgeAffinity(const Scene& scene_inf, const Scene& scene_veh,
                           Feature feature, double sigma_length,
                           double sigma_angle)
    : feature_(feature),
      sigma_length_(sigma_length),
      sigma_angle_(sigma_angle) {
  if (scene_inf.boxes.size() < 2)
    throw InsufficientBoxes("edge affinities need >= 2 infrastructure boxes");
  if (scene_veh.boxes.size() < 2)
    throw InsufficientBoxes("edge affinities need >= 2 vehicle boxes");
  pairwise_edge_features(scene_inf, infra_dist_, infra_relyaw_);
  pairwise_edge_features(scene_veh, veh_dist_, veh_relyaw_);
  infra_cats_.reserve(scene_inf.boxes.size());
  for (const Box3D& b : scene_inf.boxes) infra_cats_.push_back(b.category);
  veh_cats_.reserve(scene_veh.boxes.size());
  for (const Box3D& b : scene_veh.boxes) veh_cats_.push_back(b.category);
}

double EdgeAffinity::operator()(Eigen::Index i, Eigen::Index i2,
                                Eigen::Index j, Eigen::Index j2) const {
  double sim = 1.0;
  if (feature_ != Feature::kAngle) {
    const double dd = std::abs(infra_dist_(i, i2) - veh_dist_(j, j2));
    sim *= std::exp(-dd / sigma_length_);
  }
  if (feature_ != Feature::kLength) {
    const double da =
        std::abs(normalize_angle(infra_relyaw_(i, i2) - veh_relyaw_(j, j2)));
    sim *= std::exp(-da / sigma_angle_);
  }
  return sim;
}

EdgeAffinity length_affinity(const Scene& scene_inf, const Scene& scene_veh,
                             double sigma_length) {
  return EdgeAffinity(scene_inf, scene_veh, EdgeAffinity::Feature::kLength,
                      sigma_length, 0.2);
}

EdgeAffinity angle_affinity(const Scene& scene_inf, const Scene& scene_veh,
                            double sigma_angle) {
  return EdgeAffinity(scene_inf, scene_veh, EdgeAffinity::Feature::kAngle, 2.0,
                      sigma_angle);
}

AffinityMatrix fuse_affinity(const AffinityMatrix& k_p, const EdgeAffinity& k_q,
                             const StrategyConfig& config) {
  const Eigen::Index m = k_p.rows();
  const Eigen::Index n = k_p.cols();
  if (m != k_q.infra_count() || n != k_q.vehicle_count())
    throw DimensionMismatch("vertex and edge affinity sizes disagree");

  const double w = config.edge_fusion_weight;
  AffinityMatrix out(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (k_q.infra_category(i) != k_q.vehicle_category(j)) continue;
      double sum = 0.0;
      long count = 0;
      for (Eigen::Index i2 = 0; i2 < m; ++i2) {
        if (i2 == i) continue;
        for (Eigen::Index j2 = 0; j2 < n; ++j2) {
          if (j2 == j) continue;
          // Endpoint-consistent edge pairs only: the non-shared endpoints
          // must agree in category for the comparison to be meaningful.
          if (k_q.infra_category(i2) != k_q.vehicle_category(j2)) continue;
          sum += k_q(i, i2, j, j2);
          ++count;
        }
      }
      const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
      out.values(i, j) = (1.0 - w) * k_p.values(i, j) + w * mean;
      out.hypothesis(i, j) = k_p.hypothesis(i, j);
    }
  }
  return out;
}

}  // namespace v2icalib
