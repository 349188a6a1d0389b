// Python bindings over the calibration core. Mirrors the C++ API names;
// matrices and vectors cross the boundary as numpy arrays.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "v2icalib/data_io.hpp"
#include "v2icalib/errors.hpp"
#include "v2icalib/evaluation.hpp"
#include "v2icalib/geometry.hpp"
#include "v2icalib/pipeline.hpp"

namespace py = pybind11;
using namespace v2icalib;

PYBIND11_MODULE(_core, m) {
  m.doc() = "LiDAR extrinsic calibration from cooperative 3D detections";

  py::register_exception<CalibError>(m, "CalibError");

  py::enum_<Category>(m, "Category")
      .value("CAR", Category::kCar)
      .value("TRUCK", Category::kTruck)
      .value("VAN", Category::kVan)
      .value("BUS", Category::kBus)
      .value("PEDESTRIAN", Category::kPedestrian)
      .value("CYCLIST", Category::kCyclist)
      .value("MOTORCYCLE", Category::kMotorcycle)
      .value("OTHER", Category::kOther);

  py::enum_<CalibrationStatus>(m, "CalibrationStatus")
      .value("OK", CalibrationStatus::kOk)
      .value("NO_COMMON_TARGETS", CalibrationStatus::kNoCommonTargets)
      .value("DEGENERATE", CalibrationStatus::kDegenerate);

  py::enum_<Difficulty>(m, "Difficulty")
      .value("EASY", Difficulty::kEasy)
      .value("HARD", Difficulty::kHard)
      .value("UNKNOWN", Difficulty::kUnknown);

  py::enum_<AffinityKind>(m, "AffinityKind")
      .value("CORE_CATEGORY", AffinityKind::kCoreCategory)
      .value("CORE_ONLY", AffinityKind::kCoreOnly)
      .value("ANGLE_CATEGORY", AffinityKind::kAngleCategory)
      .value("LENGTH_CATEGORY", AffinityKind::kLengthCategory)
      .value("LENGTH_ANGLE_CATEGORY", AffinityKind::kLengthAngleCategory);

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init<>())
      .def_readwrite("rotation", &RigidTransform::rotation)
      .def_readwrite("translation", &RigidTransform::translation)
      .def("matrix", &RigidTransform::matrix)
      .def("apply", &RigidTransform::apply, py::arg("point"))
      .def("inverse", &RigidTransform::inverse)
      .def("__repr__", [](const RigidTransform& t) {
        std::ostringstream ss;
        ss << "RigidTransform(t=[" << t.translation.transpose() << "])";
        return ss.str();
      });
  m.def("compose", &compose, py::arg("a"), py::arg("b"),
        "first apply b, then a");
  m.def("rotation_z", &rotation_z, py::arg("yaw"));

  py::class_<Box3D>(m, "Box3D")
      .def(py::init<Category, const Eigen::Vector3d&, const Eigen::Vector3d&,
                    double, double, std::optional<std::int64_t>>(),
           py::arg("category"), py::arg("center"), py::arg("size"),
           py::arg("yaw"), py::arg("confidence") = 1.0,
           py::arg("track_id") = std::nullopt)
      .def_readwrite("category", &Box3D::category)
      .def_readwrite("center", &Box3D::center)
      .def_readwrite("size", &Box3D::size)
      .def_readwrite("yaw", &Box3D::yaw)
      .def_readwrite("confidence", &Box3D::confidence)
      .def_readwrite("track_id", &Box3D::track_id)
      .def("__repr__", [](const Box3D& b) {
        std::ostringstream ss;
        ss << "Box3D(" << to_string(b.category) << ", c=["
           << b.center.transpose() << "], yaw=" << b.yaw << ")";
        return ss.str();
      });

  py::class_<Scene>(m, "Scene")
      .def(py::init<>())
      .def_readwrite("frame_id", &Scene::frame_id)
      .def_readwrite("boxes", &Scene::boxes)
      .def("__len__", [](const Scene& s) { return s.boxes.size(); });

  py::class_<StrategyConfig>(m, "StrategyConfig")
      .def(py::init<>())
      .def_readwrite("affinity_kind", &StrategyConfig::affinity_kind)
      .def_readwrite("use_confidence_weighting",
                     &StrategyConfig::use_confidence_weighting)
      .def_readwrite("oiou_gate", &StrategyConfig::oiou_gate)
      .def_readwrite("edge_fusion_weight", &StrategyConfig::edge_fusion_weight)
      .def_readwrite("sigma_length", &StrategyConfig::sigma_length)
      .def_readwrite("sigma_angle", &StrategyConfig::sigma_angle)
      .def_readwrite("use_refinement", &StrategyConfig::use_refinement)
      .def_readwrite("refine_max_iterations",
                     &StrategyConfig::refine_max_iterations)
      .def_readwrite("refine_convergence_tol",
                     &StrategyConfig::refine_convergence_tol);
  m.def("strategy_preset", &strategy_preset, py::arg("name"));

  py::class_<Match>(m, "Match")
      .def_readonly("infra_index", &Match::infra_index)
      .def_readonly("vehicle_index", &Match::vehicle_index)
      .def_readonly("affinity", &Match::affinity);

  py::class_<MatchSet>(m, "MatchSet")
      .def_readonly("pairs", &MatchSet::pairs)
      .def_readonly("threshold_used", &MatchSet::threshold_used);

  py::class_<StageTimings>(m, "StageTimings")
      .def_readonly("affinity_ms", &StageTimings::affinity_ms)
      .def_readonly("matching_ms", &StageTimings::matching_ms)
      .def_readonly("solve_ms", &StageTimings::solve_ms)
      .def_readonly("refine_ms", &StageTimings::refine_ms)
      .def("total_ms", &StageTimings::total_ms);

  py::class_<CalibrationResult>(m, "CalibrationResult")
      .def_readonly("extrinsic", &CalibrationResult::extrinsic)
      .def_readonly("matches", &CalibrationResult::matches)
      .def_readonly("scene_oiou", &CalibrationResult::scene_oiou)
      .def_readonly("stage_timings", &CalibrationResult::stage_timings)
      .def_readonly("status", &CalibrationResult::status);

  m.def("iou_3d",
        py::overload_cast<const Box3D&, const Box3D&>(&iou_3d),
        py::arg("a"), py::arg("b"),
        "exact IoU of two yaw-oriented boxes");
  m.def("normalize_angle", &normalize_angle, py::arg("radians"));

  m.def("calibrate", &calibrate, py::arg("scene_inf"), py::arg("scene_veh"),
        py::arg("config") = StrategyConfig{},
        py::call_guard<py::gil_scoped_release>(),
        "estimate the infrastructure-to-vehicle extrinsic");
  m.def("monitor_oiou", &monitor_oiou, py::arg("result"),
        py::arg("scene_inf"), py::arg("scene_veh"));

  m.def("rre", &rre, py::arg("r_true"), py::arg("r_est"),
        "relative rotation error, degrees");
  m.def("rte", &rte, py::arg("t_true"), py::arg("t_est"),
        "relative translation error, meters");
  m.def("success", &success, py::arg("rte_value"), py::arg("threshold") = 2.0);

  py::class_<DifficultyRule>(m, "DifficultyRule")
      .def(py::init<>())
      .def_readwrite("min_covisible_pairs", &DifficultyRule::min_covisible_pairs)
      .def_readwrite("covisible_iou", &DifficultyRule::covisible_iou)
      .def_readwrite("max_translation", &DifficultyRule::max_translation);

  py::class_<FramePairRecord>(m, "FramePairRecord")
      .def(py::init<>())
      .def_readwrite("scene_inf", &FramePairRecord::scene_inf)
      .def_readwrite("scene_veh", &FramePairRecord::scene_veh)
      .def_readwrite("gt_extrinsic", &FramePairRecord::gt_extrinsic)
      .def_readwrite("difficulty", &FramePairRecord::difficulty);
  m.def("classify_difficulty", &classify_difficulty, py::arg("record"),
        py::arg("rule") = DifficultyRule{});

  py::class_<FrameResult>(m, "FrameResult")
      .def_readonly("rre_deg", &FrameResult::rre_deg)
      .def_readonly("rte_m", &FrameResult::rte_m)
      .def_readonly("success", &FrameResult::success)
      .def_readonly("time_ms", &FrameResult::time_ms)
      .def_readonly("status", &FrameResult::status)
      .def_readonly("difficulty", &FrameResult::difficulty);

  py::class_<GroupAggregate>(m, "GroupAggregate")
      .def_readonly("name", &GroupAggregate::name)
      .def_readonly("frames", &GroupAggregate::frames)
      .def_readonly("ok_frames", &GroupAggregate::ok_frames)
      .def_readonly("mean_rre_deg", &GroupAggregate::mean_rre_deg)
      .def_readonly("mean_rte_m", &GroupAggregate::mean_rte_m)
      .def_readonly("success_rate_pct", &GroupAggregate::success_rate_pct)
      .def_readonly("mean_time_ms", &GroupAggregate::mean_time_ms);

  py::class_<BenchmarkReport>(m, "BenchmarkReport")
      .def_readonly("rows", &BenchmarkReport::rows)
      .def_readonly("groups", &BenchmarkReport::groups)
      .def_readonly("success_threshold", &BenchmarkReport::success_threshold);

  m.def(
      "run_benchmark",
      [](const std::vector<FramePairRecord>& dataset,
         const StrategyConfig& config, int jobs, double threshold) {
        return run_benchmark(dataset, config, jobs, threshold);
      },
      py::arg("dataset"), py::arg("config") = StrategyConfig{},
      py::arg("jobs") = 1, py::arg("success_threshold") = 2.0,
      py::call_guard<py::gil_scoped_release>());

  py::class_<SynthParams>(m, "SynthParams")
      .def(py::init<>())
      .def_readwrite("n_common", &SynthParams::n_common)
      .def_readwrite("n_infra_only", &SynthParams::n_infra_only)
      .def_readwrite("n_vehicle_only", &SynthParams::n_vehicle_only)
      .def_readwrite("area", &SynthParams::area)
      .def_readwrite("gt_transform", &SynthParams::gt_transform)
      .def_readwrite("gt_yaw_range", &SynthParams::gt_yaw_range)
      .def_readwrite("gt_translation_range",
                     &SynthParams::gt_translation_range)
      .def_readwrite("noise_center_sigma", &SynthParams::noise_center_sigma)
      .def_readwrite("noise_yaw_sigma", &SynthParams::noise_yaw_sigma)
      .def_readwrite("noise_size_sigma", &SynthParams::noise_size_sigma)
      .def_readwrite("seed", &SynthParams::seed);
  m.def("synth_scene_pair", &synth_scene_pair, py::arg("params"));
  m.def("synth_dataset", &synth_dataset, py::arg("params"), py::arg("count"));

  m.def("load_scene", &load_scene, py::arg("path"));
  m.def("save_scene", &save_scene, py::arg("scene"), py::arg("path"));
  m.def("load_extrinsic", &load_extrinsic, py::arg("path"));
  m.def("save_extrinsic", &save_extrinsic, py::arg("transform"),
        py::arg("path"));
  m.def("load_strategy", &load_strategy, py::arg("path"));
  m.def("save_strategy", &save_strategy, py::arg("config"), py::arg("path"));
  m.def("load_dataset", &load_dataset, py::arg("manifest_path"));
  m.def("save_dataset", &save_dataset, py::arg("records"),
        py::arg("directory"), py::arg("provenance"));
  m.def("export_report", &export_report, py::arg("report"), py::arg("path"),
        py::arg("stable_output") = false);
  m.def("export_result", &export_result, py::arg("result"), py::arg("path"),
        py::arg("gt") = std::optional<RigidTransform>{},
        py::arg("stable_output") = false);
  m.def("export_merged_geometry", &export_merged_geometry, py::arg("result"),
        py::arg("scene_inf"), py::arg("scene_veh"), py::arg("path"));
}
