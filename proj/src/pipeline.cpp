#include "v2icalib/pipeline.hpp"

#include <chrono>

#include "v2icalib/errors.hpp"
#include "v2icalib/extrinsics.hpp"
#include "v2icalib/geometry.hpp"

namespace v2icalib {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

AffinityMatrix build_affinity(const Scene& scene_inf, const Scene& scene_veh,
                              const StrategyConfig& config) {
  switch (config.affinity_kind) {
    case AffinityKind::kCoreCategory:
    case AffinityKind::kCoreOnly:
      return core_affinity(scene_inf, scene_veh, config);
    case AffinityKind::kAngleCategory:
    case AffinityKind::kLengthCategory:
    case AffinityKind::kLengthAngleCategory:
      break;
  }
  EdgeAffinity::Feature feature = EdgeAffinity::Feature::kLengthAngle;
  if (config.affinity_kind == AffinityKind::kAngleCategory)
    feature = EdgeAffinity::Feature::kAngle;
  else if (config.affinity_kind == AffinityKind::kLengthCategory)
    feature = EdgeAffinity::Feature::kLength;

  const AffinityMatrix k_p = category_affinity(scene_inf, scene_veh, config);
  const EdgeAffinity k_q(scene_inf, scene_veh, feature, config.sigma_length,
                         config.sigma_angle);
  return fuse_affinity(k_p, k_q, config);
}

}  // namespace

std::string_view to_string(CalibrationStatus status) {
  switch (status) {
    case CalibrationStatus::kOk:
      return "ok";
    case CalibrationStatus::kNoCommonTargets:
      return "no_common_targets";
    case CalibrationStatus::kDegenerate:
      return "degenerate";
  }
  return "degenerate";
}

CalibrationStatus calibration_status_from_string(std::string_view name) {
  if (name == "ok") return CalibrationStatus::kOk;
  if (name == "no_common_targets") return CalibrationStatus::kNoCommonTargets;
  if (name == "degenerate") return CalibrationStatus::kDegenerate;
  throw ParseError("unknown calibration status: " + std::string(name));
}

StrategyConfig strategy_preset(std::string_view name) {
  StrategyConfig config;  // defaults are v1: core+category, refinement on
  if (name == "v1") return config;
  if (name == "v2") {
    config.use_refinement = false;
    return config;
  }
  if (name == "v3") {
    config.affinity_kind = AffinityKind::kLengthAngleCategory;
    config.edge_fusion_weight = 1.0;
    return config;
  }
  throw ParseError("unknown strategy preset: " + std::string(name));
}

CalibrationResult calibrate(const Scene& scene_inf, const Scene& scene_veh,
                            const StrategyConfig& config) {
  if (scene_inf.boxes.empty())
    throw EmptyScene("infrastructure scene has no boxes");
  if (scene_veh.boxes.empty()) throw EmptyScene("vehicle scene has no boxes");

  CalibrationResult result;
  result.strategy = config;

  AffinityMatrix affinity;
  {
    const auto start = Clock::now();
    try {
      affinity = build_affinity(scene_inf, scene_veh, config);
    } catch (const InsufficientBoxes&) {
      // Edge strategies cannot form a graph on single-box scenes.
      result.status = CalibrationStatus::kDegenerate;
      result.stage_timings.affinity_ms = ms_since(start);
      return result;
    }
    result.stage_timings.affinity_ms = ms_since(start);
  }

  {
    const auto start = Clock::now();
    try {
      result.matches = match_scenes(affinity, config.oiou_gate);
    } catch (const NoMatches&) {
      result.status = CalibrationStatus::kNoCommonTargets;
      result.stage_timings.matching_ms = ms_since(start);
      return result;
    }
    result.stage_timings.matching_ms = ms_since(start);
  }

  VertexCloud p_inf, p_veh;
  std::vector<double> weights;
  {
    const auto start = Clock::now();
    try {
      std::tie(p_inf, p_veh) =
          resolve_correspondence(result.matches, scene_inf, scene_veh);
      if (config.use_confidence_weighting) {
        weights.reserve(p_inf.points.size());
        for (const Match& m : result.matches.pairs) {
          const double w =
              scene_inf.boxes[static_cast<std::size_t>(m.infra_index)]
                  .confidence *
              scene_veh.boxes[static_cast<std::size_t>(m.vehicle_index)]
                  .confidence;
          for (int k = 0; k < 8; ++k) weights.push_back(w);
        }
      }
      result.extrinsic = svd_fit(p_inf, p_veh, weights);
    } catch (const DegenerateGeometry&) {
      result.status = CalibrationStatus::kDegenerate;
      result.stage_timings.solve_ms = ms_since(start);
      return result;
    }
    result.stage_timings.solve_ms = ms_since(start);
  }

  if (config.use_refinement) {
    const auto start = Clock::now();
    RefinementParams params;
    params.max_iterations = config.refine_max_iterations;
    params.convergence_tol = config.refine_convergence_tol;
    result.extrinsic = refine(result.extrinsic, p_inf, p_veh, params, weights);
    result.stage_timings.refine_ms = ms_since(start);
  }

  std::vector<OrientedBox> infra_moved;
  infra_moved.reserve(scene_inf.boxes.size());
  for (const Box3D& b : scene_inf.boxes)
    infra_moved.push_back(apply_transform(result.extrinsic, b));
  result.scene_oiou = overall_iou(infra_moved, scene_veh.boxes);
  result.status = CalibrationStatus::kOk;
  return result;
}

double monitor_oiou(const CalibrationResult& result, const Scene& scene_inf,
                    const Scene& scene_veh) {
  if (result.status != CalibrationStatus::kOk)
    throw InvalidStatus("monitoring requires a successful calibration");
  std::vector<OrientedBox> infra_moved;
  infra_moved.reserve(scene_inf.boxes.size());
  for (const Box3D& b : scene_inf.boxes)
    infra_moved.push_back(apply_transform(result.extrinsic, b));
  return overall_iou(infra_moved, scene_veh.boxes);
}

}  // namespace v2icalib
