"""LiDAR extrinsic calibration from cooperative 3D detection boxes.

Thin re-export of the native module; see the project README for the
algorithm and file formats.
"""

from ._core import (
    AffinityKind,
    BenchmarkReport,
    Box3D,
    CalibError,
    CalibrationResult,
    CalibrationStatus,
    Category,
    Difficulty,
    DifficultyRule,
    FramePairRecord,
    FrameResult,
    GroupAggregate,
    Match,
    MatchSet,
    RigidTransform,
    Scene,
    StageTimings,
    StrategyConfig,
    SynthParams,
    calibrate,
    classify_difficulty,
    compose,
    export_merged_geometry,
    export_report,
    export_result,
    iou_3d,
    load_dataset,
    load_extrinsic,
    load_scene,
    load_strategy,
    monitor_oiou,
    normalize_angle,
    rotation_z,
    rre,
    rte,
    run_benchmark,
    save_dataset,
    save_extrinsic,
    save_scene,
    save_strategy,
    strategy_preset,
    success,
    synth_dataset,
    synth_scene_pair,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityKind",
    "BenchmarkReport",
    "Box3D",
    "CalibError",
    "CalibrationResult",
    "CalibrationStatus",
    "Category",
    "Difficulty",
    "DifficultyRule",
    "FramePairRecord",
    "FrameResult",
    "GroupAggregate",
    "Match",
    "MatchSet",
    "RigidTransform",
    "Scene",
    "StageTimings",
    "StrategyConfig",
    "SynthParams",
    "calibrate",
    "classify_difficulty",
    "compose",
    "export_merged_geometry",
    "export_report",
    "export_result",
    "iou_3d",
    "load_dataset",
    "load_extrinsic",
    "load_scene",
    "load_strategy",
    "monitor_oiou",
    "normalize_angle",
    "rotation_z",
    "rre",
    "rte",
    "run_benchmark",
    "save_dataset",
    "save_extrinsic",
    "save_scene",
    "save_strategy",
    "strategy_preset",
    "success",
    "synth_dataset",
    "synth_scene_pair",
]
