"""Velocity-level merging of absolute and relative primitive skills.

Absolute skills contribute object-frame twists that are transported to
both contacts through the global grasp map; relative skills contribute
per-contact twists directly. The merged commands are

    [v_left; v_right] = G^T sum_j w_j v_obj_j + sum_k w_k [v_CL_k; v_CR_k]

with no normalization of the weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .avoidance import AvoidanceParams
from .dmp import DmpModel
from .grasp import GraspConfig, Twist, global_grasp_map
from .maintenance import DistanceCouplingSkill, ForceCouplingSkill


@dataclass(frozen=True)
class CommandPair:
    """Velocity commands for the left and right end-effector."""

    v_left: Twist
    v_right: Twist

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.v_left.as_vector(),
                               self.v_right.as_vector()])


@dataclass(frozen=True)
class AbsoluteSkill:
    """A learned object-frame motion, optionally steered around obstacles."""

    model: DmpModel
    avoidance: AvoidanceParams | None = None


@dataclass(frozen=True)
class SkillLibrary:
    """Absolute and relative skills with their default merge weights."""

    absolute: tuple[AbsoluteSkill, ...] = ()
    relative: tuple[DistanceCouplingSkill | ForceCouplingSkill, ...] = ()
    weights_abs: np.ndarray = field(default=None)
    weights_rel: np.ndarray = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "absolute", tuple(self.absolute))
        object.__setattr__(self, "relative", tuple(self.relative))
        w_abs = self.weights_abs
        if w_abs is None:
            w_abs = np.ones(len(self.absolute))
        w_rel = self.weights_rel
        if w_rel is None:
            w_rel = np.ones(len(self.relative))
        w_abs = np.atleast_1d(np.asarray(w_abs, dtype=float))
        w_rel = np.atleast_1d(np.asarray(w_rel, dtype=float)) \
            if len(self.relative) else np.zeros(0)
        _check_weights(w_abs, len(self.absolute), "weights_abs")
        _check_weights(w_rel, len(self.relative), "weights_rel")
        object.__setattr__(self, "weights_abs", w_abs)
        object.__setattr__(self, "weights_rel", w_rel)


def _check_weights(weights: np.ndarray, n: int, name: str) -> None:
    if weights.shape != (n,):
        raise ValueError(f"{name} must have length {n}")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError(f"{name} entries must be finite and >= 0")


def merge(grasp: GraspConfig, abs_velocities, w_abs,
          rel_velocities, w_rel) -> CommandPair:
    """Merge weighted skill velocities into end-effector commands.

    ``abs_velocities`` is a sequence of object twists, ``rel_velocities``
    a sequence of (left, right) contact-twist pairs. Weight vectors must
    be nonnegative and match in length.
    """
    abs_velocities = list(abs_velocities)
    rel_velocities = list(rel_velocities)
    w_abs = np.atleast_1d(np.asarray(w_abs, dtype=float)) \
        if len(abs_velocities) else np.zeros(0)
    w_rel = np.atleast_1d(np.asarray(w_rel, dtype=float)) \
        if len(rel_velocities) else np.zeros(0)
    _check_weights(w_abs, len(abs_velocities), "w_abs")
    _check_weights(w_rel, len(rel_velocities), "w_rel")

    object_sum = np.zeros(6)
    for w, twist in zip(w_abs, abs_velocities):
        object_sum += w * twist.as_vector()
    stacked = global_grasp_map(grasp).T @ object_sum
    for w, (left, right) in zip(w_rel, rel_velocities):
        stacked[:6] += w * left.as_vector()
        stacked[6:] += w * right.as_vector()
    return CommandPair(Twist.from_vector(stacked[:6]),
                       Twist.from_vector(stacked[6:]))
