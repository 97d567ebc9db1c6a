"""primo: primitive-skill motion library and dual-arm kinematic simulator."""

from .avoidance import (AvoidanceParams, Obstacle, avoidance_coupling,
                        extract_turning_series, learn_params, steering_angle,
                        turning_rate)
from .composition import AbsoluteSkill, CommandPair, SkillLibrary, merge
from .demos import (Pca2dProjection, PreprocessConfig, RawDemo,
                    generate_synthetic_demo, pca_project, preprocess)
from .dmp import (DmpModel, canonical_rollout, fit_weights, forcing_term,
                  rollout)
from .grasp import (GraspConfig, Twist, contact_twist, global_grasp_map,
                    grasp_matrix, skew)
from .maintenance import (DistanceCouplingSkill, ForceCouplingSkill,
                          distance_correction, force_correction)
from .simulator import (BatchResult, Disturbance, Metrics, RolloutLog, Scene,
                        WeightPhase, batch_run, run_pick_and_raise, run_scene)
from .trajectory import StateTriplet, Trajectory

__version__ = "0.1.0"

__all__ = [
    "AbsoluteSkill", "AvoidanceParams", "BatchResult", "CommandPair",
    "DistanceCouplingSkill", "Disturbance", "DmpModel", "ForceCouplingSkill",
    "GraspConfig", "Metrics", "Obstacle", "Pca2dProjection",
    "PreprocessConfig", "RawDemo", "RolloutLog", "Scene", "SkillLibrary",
    "StateTriplet", "Trajectory", "Twist", "WeightPhase",
    "avoidance_coupling", "batch_run", "canonical_rollout", "contact_twist",
    "distance_correction", "extract_turning_series", "fit_weights",
    "force_correction", "forcing_term", "generate_synthetic_demo",
    "global_grasp_map", "grasp_matrix", "learn_params", "merge",
    "pca_project", "preprocess", "rollout", "run_pick_and_raise",
    "run_scene", "skew", "steering_angle", "turning_rate",
]
