#include "v2icalib/extrinsics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "v2icalib/errors.hpp"
#include "v2icalib/geometry.hpp"

namespace v2icalib {

namespace {

constexpr double kNearSquare = 0.05;  // meters, |l - w| below this

double point_weight(std::span<const double> weights, std::size_t k) {
  return weights.empty() ? 1.0 : weights[k];
}

/// Mean point-to-point distance between index-corresponded clouds under t.
double alignment_residual(const RigidTransform& t,
                          const std::vector<Eigen::Vector3d>& src,
                          const std::vector<Eigen::Vector3d>& dst) {
  double sum = 0.0;
  for (std::size_t k = 0; k < src.size(); ++k)
    sum += (t.apply(src[k]) - dst[k]).norm();
  return sum / static_cast<double>(src.size());
}

RigidTransform fit_points(const std::vector<Eigen::Vector3d>& src,
                          const std::vector<Eigen::Vector3d>& dst,
                          std::span<const double> weights) {
  const std::size_t n = src.size();
  if (n != dst.size() || (!weights.empty() && weights.size() != n))
    throw DimensionMismatch("corresponded clouds differ in length");
  if (n < 3)
    throw DegenerateGeometry("rigid fit needs at least 3 corresponded points");

  double total = 0.0;
  Eigen::Vector3d c_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d c_dst = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const double w = point_weight(weights, k);
    total += w;
    c_src += w * src[k];
    c_dst += w * dst[k];
  }
  if (total <= 0.0) throw DegenerateGeometry("total fit weight is zero");
  c_src /= total;
  c_dst /= total;

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const double w = point_weight(weights, k);
    const Eigen::Vector3d ps = src[k] - c_src;
    cross += w * ps * (dst[k] - c_dst).transpose();
    scatter += w * ps * ps.transpose();
  }

  // Collinear sources leave the rotation underdetermined about their axis.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> scatter_eig(scatter);
  const Eigen::Vector3d ev = scatter_eig.eigenvalues();  // ascending
  if (ev(1) <= 1e-9 * std::max(ev(2), 1e-300))
    throw DegenerateGeometry("source points are collinear");

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0
                ? -1.0
                : 1.0;
  RigidTransform t;
  t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  t.translation = c_dst - t.rotation * c_src;
  return t;
}

/// Admissible vertex reorderings: heading flip for every box, plus quarter
/// turns for near-square footprints. Identity first so ties keep it.
const std::array<int, 8> kIdentityPerm = {0, 1, 2, 3, 4, 5, 6, 7};

bool near_square(const Box3D& b) {
  return std::abs(b.size.x() - b.size.y()) < kNearSquare;
}

std::vector<Eigen::Vector3d> permuted_vertices(
    const std::array<Eigen::Vector3d, 8>& v, const std::array<int, 8>& perm) {
  std::vector<Eigen::Vector3d> out(8);
  for (int k = 0; k < 8; ++k)
    out[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(perm[k])];
  return out;
}

}  // namespace

RigidTransform svd_fit(const VertexCloud& src, const VertexCloud& dst,
                       std::span<const double> weights) {
  return fit_points(src.points, dst.points, weights);
}

std::pair<VertexCloud, VertexCloud> resolve_correspondence(
    const MatchSet& matches, const Scene& scene_inf, const Scene& scene_veh) {
  if (matches.pairs.empty())
    throw NoMatches("correspondence needs at least one matched pair");

  const std::size_t pair_count = matches.pairs.size();
  std::vector<std::array<Eigen::Vector3d, 8>> inf_verts(pair_count);
  VertexCloud veh;
  veh.points.reserve(8 * pair_count);
  std::vector<bool> square(pair_count);
  for (std::size_t p = 0; p < pair_count; ++p) {
    const Match& m = matches.pairs[p];
    if (m.infra_index < 0 ||
        m.infra_index >= static_cast<Eigen::Index>(scene_inf.boxes.size()) ||
        m.vehicle_index < 0 ||
        m.vehicle_index >= static_cast<Eigen::Index>(scene_veh.boxes.size()))
      throw DimensionMismatch("match index outside its scene");
    const Box3D& bi = scene_inf.boxes[static_cast<std::size_t>(m.infra_index)];
    const Box3D& bv =
        scene_veh.boxes[static_cast<std::size_t>(m.vehicle_index)];
    inf_verts[p] = box_vertices(bi);
    for (const Eigen::Vector3d& v : box_vertices(bv)) veh.points.push_back(v);
    square[p] = near_square(bi) || near_square(bv);
  }

  const auto build = [&](const std::vector<const std::array<int, 8>*>& perms) {
    VertexCloud cloud;
    cloud.points.reserve(8 * pair_count);
    for (std::size_t p = 0; p < pair_count; ++p)
      for (const Eigen::Vector3d& v : permuted_vertices(inf_verts[p], *perms[p]))
        cloud.points.push_back(v);
    return cloud;
  };
  const auto residual_of = [&](const VertexCloud& cloud) {
    return alignment_residual(fit_points(cloud.points, veh.points, {}),
                              cloud.points, veh.points);
  };

  // A lone cuboid is symmetric under its own heading flip (and quarter
  // turns when near-square): every ordering fits it exactly, so the
  // residual cannot separate them. Whole-scene oIoU can, because unmatched
  // covisible boxes only line up under the physically consistent heading.
  // Strict improvement keeps the first candidate, trusting reported yaws.
  if (pair_count == 1) {
    std::vector<const std::array<int, 8>*> candidates = {&kIdentityPerm,
                                                         &kVertexPermYawPi};
    if (square[0]) {
      candidates.push_back(&kVertexPermYawHalfPi);
      candidates.push_back(&kVertexPermYawNegHalfPi);
    }
    VertexCloud best_cloud;
    double best_score = -1.0;
    for (const std::array<int, 8>* perm : candidates) {
      VertexCloud cloud;
      cloud.points = permuted_vertices(inf_verts[0], *perm);
      const RigidTransform t = fit_points(cloud.points, veh.points, {});
      std::vector<OrientedBox> moved;
      moved.reserve(scene_inf.boxes.size());
      for (const Box3D& b : scene_inf.boxes)
        moved.push_back(apply_transform(t, b));
      const double score = overall_iou(moved, scene_veh.boxes);
      if (score > best_score) {
        best_score = score;
        best_cloud = std::move(cloud);
      }
    }
    return {std::move(best_cloud), std::move(veh)};
  }

  // One scene-wide heading decision: all boxes share the rigid transform,
  // so their flips are not independent.
  std::vector<const std::array<int, 8>*> perms(pair_count, &kIdentityPerm);
  VertexCloud best_cloud = build(perms);
  double best_residual = residual_of(best_cloud);
  {
    std::vector<const std::array<int, 8>*> flipped(pair_count,
                                                   &kVertexPermYawPi);
    VertexCloud cloud = build(flipped);
    const double r = residual_of(cloud);
    if (r < best_residual) {
      best_residual = r;
      best_cloud = std::move(cloud);
      perms = std::move(flipped);
    }
  }

  // Near-square boxes may additionally sit a quarter turn off; search them
  // greedily in match order.
  for (std::size_t p = 0; p < pair_count; ++p) {
    if (!square[p]) continue;
    for (const std::array<int, 8>* cand :
         {&kIdentityPerm, &kVertexPermYawPi, &kVertexPermYawHalfPi,
          &kVertexPermYawNegHalfPi}) {
      if (cand == perms[p]) continue;
      std::vector<const std::array<int, 8>*> trial = perms;
      trial[p] = cand;
      VertexCloud cloud = build(trial);
      const double r = residual_of(cloud);
      if (r < best_residual) {
        best_residual = r;
        best_cloud = std::move(cloud);
        perms = std::move(trial);
      }
    }
  }

  return {std::move(best_cloud), std::move(veh)};
}

RigidTransform refine(const RigidTransform& initial, const VertexCloud& p_inf,
                      const VertexCloud& p_veh, const RefinementParams& params,
                      std::span<const double> weights) {
  const std::size_t n = p_inf.points.size();
  if (n == 0 || n != p_veh.points.size() || n % 8 != 0) return initial;

  // Re-correspondence restricted to the matched 8-vertex group, searched
  // over the cuboid's symmetry reorderings as one unit. Per-vertex nearest
  // neighbors would admit pairings no rigid motion produces (and on small
  // boxes noise makes them win), dragging the fit off the match semantics.
  const std::array<const std::array<int, 8>*, 4> orderings = {
      &kIdentityPerm, &kVertexPermYawPi, &kVertexPermYawHalfPi,
      &kVertexPermYawNegHalfPi};
  const auto correspond = [&](const RigidTransform& t,
                              std::vector<Eigen::Vector3d>& dst) {
    double sum = 0.0;
    for (std::size_t group = 0; group < n; group += 8) {
      std::array<Eigen::Vector3d, 8> moved;
      for (std::size_t k = 0; k < 8; ++k)
        moved[k] = t.apply(p_inf.points[group + k]);
      double best = std::numeric_limits<double>::infinity();
      const std::array<int, 8>* best_perm = orderings[0];
      for (const std::array<int, 8>* perm : orderings) {
        double s = 0.0;
        for (std::size_t k = 0; k < 8; ++k)
          s += (moved[k] -
                p_veh.points[group + static_cast<std::size_t>((*perm)[k])])
                   .norm();
        if (s < best) {
          best = s;
          best_perm = perm;
        }
      }
      for (std::size_t k = 0; k < 8; ++k)
        dst[group + k] =
            p_veh.points[group + static_cast<std::size_t>((*best_perm)[k])];
      sum += best;
    }
    return sum / static_cast<double>(n);
  };

  RigidTransform current = initial;
  std::vector<Eigen::Vector3d> dst(n);
  double current_residual = correspond(current, dst);
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    RigidTransform next;
    try {
      next = fit_points(p_inf.points, dst, weights);
    } catch (const DegenerateGeometry&) {
      break;
    }
    std::vector<Eigen::Vector3d> next_dst(n);
    const double next_residual = correspond(next, next_dst);
    if (next_residual > current_residual) break;  // never regress
    const double improvement = current_residual - next_residual;
    current = next;
    current_residual = next_residual;
    dst = std::move(next_dst);
    if (improvement < params.convergence_tol) break;
  }
  return current;
}

RigidTransform estimate_extrinsic(const MatchSet& matches,
                                  const Scene& scene_inf,
                                  const Scene& scene_veh,
                                  const StrategyConfig& config) {
  if (matches.pairs.empty())
    throw NoMatches("extrinsic estimation needs at least one matched pair");

  auto [p_inf, p_veh] = resolve_correspondence(matches, scene_inf, scene_veh);

  std::vector<double> weights;
  if (config.use_confidence_weighting) {
    weights.reserve(p_inf.points.size());
    for (const Match& m : matches.pairs) {
      const double w =
          scene_inf.boxes[static_cast<std::size_t>(m.infra_index)].confidence *
          scene_veh.boxes[static_cast<std::size_t>(m.vehicle_index)].confidence;
      for (int k = 0; k < 8; ++k) weights.push_back(w);
    }
  }

  const RigidTransform initial = svd_fit(p_inf, p_veh, weights);
  if (!config.use_refinement) return initial;
  RefinementParams params;
  params.max_iterations = config.refine_max_iterations;
  params.convergence_tol = config.refine_convergence_tol;
  return refine(initial, p_inf, p_veh, params, weights);
}

}  // namespace v2icalib
