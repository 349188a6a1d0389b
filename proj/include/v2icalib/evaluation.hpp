#ifndef V2ICALIB_EVALUATION_HPP
#define V2ICALIB_EVALUATION_HPP

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "v2icalib/pipeline.hpp"
#include "v2icalib/types.hpp"

namespace v2icalib {

enum class Difficulty { kEasy, kHard, kUnknown };

std::string_view to_string(Difficulty difficulty);
Difficulty difficulty_from_string(std::string_view name);

/// One cooperative frame pair, optionally with ground truth for scoring.
struct FramePairRecord {
  Scene scene_inf;
  Scene scene_veh;
  std::optional<RigidTransform> gt_extrinsic;
  Difficulty difficulty = Difficulty::kUnknown;
};

/// Difficulty split rule. The reference experiments never published their
/// split, so these thresholds are ours and stay configurable.
struct DifficultyRule {
  int min_covisible_pairs = 4;
  double covisible_iou = 0.1;
  double max_translation = 60.0;  // meters
};

/// Rotation error in degrees: arccos((tr(R_trueT * R_est) - 1) / 2), the
/// argument clamped to [-1, 1].
double rre(const Eigen::Matrix3d& r_true, const Eigen::Matrix3d& r_est);

/// Translation error in meters: ||t_true - t_est||.
double rte(const Eigen::Vector3d& t_true, const Eigen::Vector3d& t_est);

/// Success criterion: RTE strictly below the threshold (2 m by default).
bool success(double rte_value, double threshold = 2.0);

/**
 * @brief Labels a record easy iff at least rule.min_covisible_pairs box
 * pairs exceed IoU rule.covisible_iou under the ground-truth transform AND
 * the ground-truth translation norm is within rule.max_translation.
 *
 * Throws MissingGroundTruth without a ground-truth extrinsic.
 */
Difficulty classify_difficulty(const FramePairRecord& record,
                               const DifficultyRule& rule = {});

/// Per-frame benchmark row. rre_deg/rte_m are absent when status != ok.
struct FrameResult {
  std::optional<double> rre_deg;
  std::optional<double> rte_m;
  bool success = false;
  double time_ms = 0.0;
  CalibrationStatus status = CalibrationStatus::kOk;
  Difficulty difficulty = Difficulty::kUnknown;
};

/// Aggregates for one difficulty group. Error means cover ok frames only;
/// success rate and mean time cover every frame.
struct GroupAggregate {
  std::string name;
  int frames = 0;
  int ok_frames = 0;
  std::optional<double> mean_rre_deg;
  std::optional<double> mean_rte_m;
  double success_rate_pct = 0.0;
  double mean_time_ms = 0.0;
};

struct BenchmarkReport {
  std::vector<FrameResult> rows;
  std::vector<GroupAggregate> groups;  // per difficulty, then "all"
  double success_threshold = 2.0;
};

/// Recomputes group aggregates from rows (groups "easy"/"hard"/"unknown"
/// as present, in that order, then "all"). Exposed so serialized reports
/// can be self-checked.
std::vector<GroupAggregate> aggregate_rows(std::span<const FrameResult> rows);

/**
 * @brief Runs calibrate on every record and aggregates Table-II-style
 * metrics per difficulty group.
 *
 * Records with difficulty kUnknown are classified on the fly via @p rule.
 * @p jobs > 1 processes records concurrently; rows are assembled by record
 * index, so the report is identical regardless of parallelism. Throws
 * EmptyDataset on an empty span and MissingGroundTruth if any record lacks
 * ground truth.
 */
BenchmarkReport run_benchmark(std::span<const FramePairRecord> dataset,
                              const StrategyConfig& config, int jobs = 1,
                              double success_threshold = 2.0,
                              const DifficultyRule& rule = {});

}  // namespace v2icalib

#endif  // V2ICALIB_EVALUATION_HPP
