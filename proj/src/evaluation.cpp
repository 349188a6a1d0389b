#include "v2icalib/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "v2icalib/errors.hpp"
#include "v2icalib/geometry.hpp"

namespace v2icalib {

std::string_view to_string(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy:
      return "easy";
    case Difficulty::kHard:
      return "hard";
    case Difficulty::kUnknown:
      return "unknown";
  }
  return "unknown";
}

Difficulty difficulty_from_string(std::string_view name) {
  if (name == "easy") return Difficulty::kEasy;
  if (name == "hard") return Difficulty::kHard;
  if (name == "unknown") return Difficulty::kUnknown;
  throw ParseError("unknown difficulty label: " + std::string(name));
}

double rre(const Eigen::Matrix3d& r_true, const Eigen::Matrix3d& r_est) {
  const double trace = (r_true.transpose() * r_est).trace();
  const double arg = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(arg) * 180.0 / std::numbers::pi;
}

double rte(const Eigen::Vector3d& t_true, const Eigen::Vector3d& t_est) {
  return (t_true - t_est).norm();
}

bool success(double rte_value, double threshold) {
  return rte_value < threshold;
}

Difficulty classify_difficulty(const FramePairRecord& record,
                               const DifficultyRule& rule) {
  if (!record.gt_extrinsic)
    throw MissingGroundTruth("difficulty classification needs gt_extrinsic");
  const RigidTransform& gt = *record.gt_extrinsic;

  if (gt.translation.norm() > rule.max_translation) return Difficulty::kHard;

  std::vector<OrientedBox> infra_moved;
  infra_moved.reserve(record.scene_inf.boxes.size());
  for (const Box3D& b : record.scene_inf.boxes)
    infra_moved.push_back(apply_transform(gt, b));

  int covisible = 0;
  for (const OrientedBox& a : infra_moved) {
    for (const Box3D& b : record.scene_veh.boxes) {
      if (iou_3d(a, OrientedBox::from_box(b)) > rule.covisible_iou)
        ++covisible;
    }
  }
  return covisible >= rule.min_covisible_pairs ? Difficulty::kEasy
                                               : Difficulty::kHard;
}

std::vector<GroupAggregate> aggregate_rows(std::span<const FrameResult> rows) {
  const auto aggregate = [&](std::string name, auto include) {
    GroupAggregate g;
    g.name = std::move(name);
    double rre_sum = 0.0, rte_sum = 0.0, time_sum = 0.0;
    int successes = 0;
    for (const FrameResult& row : rows) {
      if (!include(row)) continue;
      ++g.frames;
      time_sum += row.time_ms;
      if (row.success) ++successes;
      if (row.status == CalibrationStatus::kOk) {
        ++g.ok_frames;
        rre_sum += row.rre_deg.value_or(0.0);
        rte_sum += row.rte_m.value_or(0.0);
      }
    }
    if (g.frames > 0) {
      g.success_rate_pct = 100.0 * successes / g.frames;
      g.mean_time_ms = time_sum / g.frames;
    }
    if (g.ok_frames > 0) {
      g.mean_rre_deg = rre_sum / g.ok_frames;
      g.mean_rte_m = rte_sum / g.ok_frames;
    }
    return g;
  };

  std::vector<GroupAggregate> out;
  for (Difficulty d :
       {Difficulty::kEasy, Difficulty::kHard, Difficulty::kUnknown}) {
    GroupAggregate g = aggregate(std::string(to_string(d)),
                                 [d](const FrameResult& r) {
                                   return r.difficulty == d;
                                 });
    if (g.frames > 0) out.push_back(std::move(g));
  }
  out.push_back(aggregate("all", [](const FrameResult&) { return true; }));
  return out;
}

BenchmarkReport run_benchmark(std::span<const FramePairRecord> dataset,
                              const StrategyConfig& config, int jobs,
                              double success_threshold,
                              const DifficultyRule& rule) {
  if (dataset.empty()) throw EmptyDataset("benchmark needs at least 1 pair");
  for (const FramePairRecord& record : dataset) {
    if (!record.gt_extrinsic)
      throw MissingGroundTruth("benchmark records need gt_extrinsic");
  }

  BenchmarkReport report;
  report.success_threshold = success_threshold;
  report.rows.resize(dataset.size());

  const auto evaluate = [&](std::size_t index) {
    const FramePairRecord& record = dataset[index];
    FrameResult row;
    row.difficulty = record.difficulty == Difficulty::kUnknown
                         ? classify_difficulty(record, rule)
                         : record.difficulty;

    try {
      CalibrationResult result =
          calibrate(record.scene_inf, record.scene_veh, config);
      row.time_ms = result.stage_timings.total_ms();
      row.status = result.status;
      if (result.status == CalibrationStatus::kOk) {
        const RigidTransform& gt = *record.gt_extrinsic;
        row.rre_deg = rre(gt.rotation, result.extrinsic.rotation);
        row.rte_m = rte(gt.translation, result.extrinsic.translation);
        row.success = success(*row.rte_m, success_threshold);
      }
    } catch (const CalibError&) {
      // Per-frame failures (e.g. an empty scene) are recorded, not fatal.
      row.status = CalibrationStatus::kDegenerate;
    }
    report.rows[index] = std::move(row);
  };

  const int workers = std::max(
      1, std::min<int>(jobs, static_cast<int>(dataset.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < dataset.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < dataset.size();
             i = next.fetch_add(1)) {
          evaluate(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  report.groups = aggregate_rows(report.rows);
  return report;
}

}  // namespace v2icalib
