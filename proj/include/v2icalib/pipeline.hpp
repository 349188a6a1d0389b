#ifndef V2ICALIB_PIPELINE_HPP
#define V2ICALIB_PIPELINE_HPP

#include <string_view>

#include "v2icalib/affinity.hpp"
#include "v2icalib/matching.hpp"
#include "v2icalib/types.hpp"

namespace v2icalib {

enum class CalibrationStatus {
  kOk,
  kNoCommonTargets,  // matching found nothing above the gate
  kDegenerate,       // geometry too poor to constrain the fit
};

std::string_view to_string(CalibrationStatus status);
CalibrationStatus calibration_status_from_string(std::string_view name);

/// Wall-clock cost per pipeline stage, milliseconds.
struct StageTimings {
  double affinity_ms = 0.0;
  double matching_ms = 0.0;
  double solve_ms = 0.0;
  double refine_ms = 0.0;

  double total_ms() const {
    return affinity_ms + matching_ms + solve_ms + refine_ms;
  }
};

struct CalibrationResult {
  RigidTransform extrinsic;
  MatchSet matches;
  double scene_oiou = 0.0;  // whole-scene oIoU under the final extrinsic
  StageTimings stage_timings;
  StrategyConfig strategy;
  CalibrationStatus status = CalibrationStatus::kOk;
};

/// Named strategy presets: v1 = core+category with refinement,
/// v2 = core+category without refinement, v3 = length+angle+category with
/// refinement. Throws ParseError on unknown names.
StrategyConfig strategy_preset(std::string_view name);

/**
 * @brief Full calibration flow: affinity matrix -> assignment -> filter ->
 * extrinsic fit -> optional refinement -> final oIoU scoring.
 *
 * Needs no initial extrinsic guess. Matching failure is reported as
 * status kNoCommonTargets and unconstrainable geometry (including edge
 * strategies on single-box scenes) as kDegenerate; both leave the identity
 * extrinsic in place. Throws EmptyScene on empty input.
 */
CalibrationResult calibrate(const Scene& scene_inf, const Scene& scene_veh,
                            const StrategyConfig& config);

/// Re-scores whole-scene oIoU under result.extrinsic; the paper's online
/// health signal (higher = better alignment). Throws InvalidStatus unless
/// result.status is kOk.
double monitor_oiou(const CalibrationResult& result, const Scene& scene_inf,
                    const Scene& scene_veh);

}  // namespace v2icalib

#endif  // V2ICALIB_PIPELINE_HPP
