"""Metro-station digital twin: passenger flow simulation, probabilistic
camera detection, experiment harness, and placement optimization."""

__version__ = "0.1.0"

from .detection import (
    DetectionThreshold,
    DetectionWeights,
    NormalizationBounds,
    ObservationSample,
    analytic_detection_rate,
    calibrate_exceedance,
    calibrate_weights,
    detection_probability,
    normalize_angle,
    normalize_density,
    normalize_distance,
    trajectory_detected,
)
from .experiments import (
    ExperimentPlan,
    ExperimentReport,
    compare_to_reference,
    export_report,
    load_reference_table,
    run_experiment,
)
from .heatmap import HeatmapGrid, compute_heatmap
from .optimizer import (
    FreeParams,
    ObjectiveConfig,
    OptimizationProblem,
    OptimizationResult,
    evaluate_objective,
    optimize,
)
from .simulation import (
    Agent,
    SimConfig,
    SimOutput,
    TimeOfDay,
    TrafficTable,
    observe,
    run_simulation,
    sample_delay,
    scenario_route,
    suspect_trajectory_verdict,
)
from .station import (
    Camera,
    CameraPreset,
    StationLayout,
    builtin_preset,
    default_layout,
    default_layout_path,
    load_layout,
    save_layout,
    shortest_route,
)

__all__ = [
    "Agent",
    "Camera",
    "CameraPreset",
    "DetectionThreshold",
    "DetectionWeights",
    "ExperimentPlan",
    "ExperimentReport",
    "FreeParams",
    "HeatmapGrid",
    "NormalizationBounds",
    "ObjectiveConfig",
    "ObservationSample",
    "OptimizationProblem",
    "OptimizationResult",
    "SimConfig",
    "SimOutput",
    "StationLayout",
    "TimeOfDay",
    "TrafficTable",
    "analytic_detection_rate",
    "builtin_preset",
    "calibrate_exceedance",
    "calibrate_weights",
    "compare_to_reference",
    "compute_heatmap",
    "default_layout",
    "default_layout_path",
    "detection_probability",
    "evaluate_objective",
    "export_report",
    "load_layout",
    "load_reference_table",
    "normalize_angle",
    "normalize_density",
    "normalize_distance",
    "observe",
    "optimize",
    "run_experiment",
    "run_simulation",
    "sample_delay",
    "save_layout",
    "scenario_route",
    "shortest_route",
    "suspect_trajectory_verdict",
    "trajectory_detected",
]
