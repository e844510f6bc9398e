"""Furniture rearrangement for shared human-robot indoor spaces."""

from .field import (
    AccessibleRegion,
    FieldGrid,
    accessible_region,
    free_space,
    interaction_field,
    scene_sdf,
    shortest_path,
)
from .geometry import OrientedRect, Pose2, Room, rect_separation, sd_rect, sd_room_interior
from .grouping import FunctionalGroups, Gmm1D, extract_groups, fit_gmm_1d
from .metrics import SceneMetrics, compare, reachable_objects, scene_metrics
from .objective import (
    Evaluation,
    ObjectiveConfig,
    TaskSet,
    evaluate,
    human_term,
    motion_cost,
    robot_term,
)
from .optimize import AsaConfig, CmaConfig, OptimizeConfig, asa_minimize, cma_minimize, optimize_scene
from .relations import (
    RelationStats,
    SceneGraph,
    SemanticTable,
    build_graph,
    cooccur_prob,
    semantic_rel,
    spatial_rel,
    stats_build,
)
from .scene import Layout, RobotSpec, Scene, SceneError, SceneObject, apply_layout, load_scene, save_scene

__version__ = "0.1.0"
