#ifndef V2ICALIB_DATA_IO_HPP
#define V2ICALIB_DATA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "v2icalib/evaluation.hpp"
#include "v2icalib/pipeline.hpp"
#include "v2icalib/types.hpp"

namespace v2icalib {

/**
 * Scene files are JSON arrays of box objects:
 *   [{"category": "car", "center": [x, y, z], "size": [l, w, h],
 *     "yaw": 0.3, "confidence": 0.9, "track_id": 5}, ...]
 * confidence and track_id are optional. Unknown categories map to "other";
 * anything else malformed is an error, never a default. The scene's
 * frame_id is the file stem.
 */
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

/// Extrinsic files hold one 4x4 homogeneous matrix as a JSON array of 4
/// rows. The bottom row must be (0,0,0,1); rotations within 1e-6 of
/// orthonormal are re-orthonormalized, anything worse raises NotRigid.
RigidTransform load_extrinsic(const std::filesystem::path& path);
void save_extrinsic(const RigidTransform& transform,
                    const std::filesystem::path& path);

/// Strategy files are JSON objects with any subset of the StrategyConfig
/// fields (missing ones keep v1 defaults); unknown keys raise SchemaError.
StrategyConfig load_strategy(const std::filesystem::path& path);
void save_strategy(const StrategyConfig& config,
                   const std::filesystem::path& path);

/// Synthetic cooperative scene pair generation. All randomness flows from
/// the 64-bit seed through a fixed generator (mt19937_64, 53-bit uniforms,
/// Box-Muller normals), so records reproduce bit-for-bit.
struct SynthParams {
  int n_common = 6;
  int n_infra_only = 0;
  int n_vehicle_only = 0;
  double area = 80.0;  // placement square side, meters

  /// Fixed ground truth; unset means a random yaw-only transform with
  /// |yaw| <= gt_yaw_range and translation uniform in a ball of radius
  /// gt_translation_range.
  std::optional<RigidTransform> gt_transform;
  double gt_yaw_range = 3.14159265358979323846;
  double gt_translation_range = 60.0;

  double noise_center_sigma = 0.0;  // meters, per axis, vehicle side
  double noise_yaw_sigma = 0.0;     // radians, vehicle side
  double noise_size_sigma = 0.0;    // meters, per axis, vehicle side

  /// Sampling weights per category; empty falls back to a traffic mix.
  std::vector<std::pair<Category, double>> category_mix;

  std::uint64_t seed = 0;
};

/// Reads SynthParams from a JSON object using the same keys as the
/// manifest's "generator" block (a stray "prng" note is tolerated);
/// unknown keys raise SchemaError.
SynthParams load_synth_params(const std::filesystem::path& path);

/**
 * @brief Generates one seeded frame pair: common objects placed without
 * overlap in the infrastructure frame, their vehicle-side copies moved by
 * the ground-truth transform plus per-box noise, and single-end boxes
 * added per side.
 *
 * Throws PlacementFailure when non-overlapping placement keeps failing.
 */
FramePairRecord synth_scene_pair(const SynthParams& params);

/// Derives per-pair seeds from params.seed and generates count records.
std::vector<FramePairRecord> synth_dataset(const SynthParams& params,
                                           int count);

/// Dataset directory layout: a manifest.json listing relative file triples
/// [{"infra": ..., "veh": ..., "gt": ...}, ...] next to the files.
std::vector<FramePairRecord> load_dataset(
    const std::filesystem::path& manifest_path);
void save_dataset(const std::vector<FramePairRecord>& records,
                  const std::filesystem::path& directory,
                  const SynthParams& provenance);

BenchmarkReport load_report(const std::filesystem::path& path);

/// Writes the report as JSON. stable_output zeroes wall-clock fields so
/// byte-identical runs can be compared across parallelism settings.
void export_report(const BenchmarkReport& report,
                   const std::filesystem::path& path,
                   bool stable_output = false);

/// Calibration result as JSON (matrix, matches, timings, status). rre/rte
/// rows appear when ground truth is supplied.
void export_result(const CalibrationResult& result,
                   const std::filesystem::path& path,
                   const std::optional<RigidTransform>& gt = std::nullopt,
                   bool stable_output = false);

/**
 * @brief Writes vehicle boxes plus extrinsic-transformed infrastructure
 * boxes as one ASCII PLY mesh (8 vertices and 6 quad faces per box, with
 * a per-vertex source channel: 0 = vehicle, 1 = infrastructure) for
 * inspection in any mesh viewer.
 */
void export_merged_geometry(const CalibrationResult& result,
                            const Scene& scene_inf, const Scene& scene_veh,
                            const std::filesystem::path& path);

}  // namespace v2icalib

#endif  // V2ICALIB_DATA_IO_HPP
