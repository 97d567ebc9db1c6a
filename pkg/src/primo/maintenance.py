"""Relative skills keeping both end-effectors coupled to the object.

Two first-order regulators are provided: a force form that turns coupling
force errors into contact velocity commands, and the distance proxy used
when no force sensing is available. Corrections are expressed in the
object frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def _gain(value) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.full(3, arr[0])
    if arr.shape != (3,):
        raise ValueError("gain must be a scalar or a 3-vector diagonal")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("gain entries must be finite and >= 0")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ForceCouplingSkill:
    """Velocity correction proportional to the coupling-force error."""

    gain: np.ndarray
    f_desired: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gain", _gain(self.gain))
        f_d = np.atleast_1d(np.asarray(self.f_desired, dtype=float))
        if f_d.shape != (3,) or not np.all(np.isfinite(f_d)):
            raise ValueError("f_desired must be a finite 3-vector")
        f_d.setflags(write=False)
        object.__setattr__(self, "f_desired", f_d)


@dataclass(frozen=True)
class DistanceCouplingSkill:
    """Velocity correction proportional to the contact-distance error.

    For symmetric tasks the two desired distances are equal; the
    constructor enforces that when ``symmetric`` is set.
    """

    gain: np.ndarray
    d_desired_left: float
    d_desired_right: float
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gain", _gain(self.gain))
        for name in ("d_desired_left", "d_desired_right"):
            val = float(getattr(self, name))
            if not np.isfinite(val) or val < 0:
                raise ValueError(f"{name} must be finite and >= 0")
            object.__setattr__(self, name, val)
        if self.symmetric and self.d_desired_left != self.d_desired_right:
            raise ValueError("symmetric task requires equal desired distances")

    def desired(self, side: str) -> float:
        if side == "left":
            return self.d_desired_left
        if side == "right":
            return self.d_desired_right
        raise ValueError(f"unknown side {side!r}")


def force_correction(skill: ForceCouplingSkill, f_measured) -> np.ndarray:
    """Contact velocity K (F_desired - F_measured)."""
    f_r = np.asarray(f_measured, dtype=float)
    if f_r.shape != (3,):
        raise ValueError("f_measured must be a 3-vector")
    return skill.gain * (skill.f_desired - f_r)


def distance_correction(skill: DistanceCouplingSkill, side: str,
                        d_measured: float, axis) -> np.ndarray:
    """Contact velocity K (D_desired - D_measured) along the contact axis.

    ``axis`` is the unit vector from the object frame to the contact, so a
    positive error (contact too close) pushes the end-effector outward.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise ValueError("axis must be a 3-vector")
    error = skill.desired(side) - float(d_measured)
    return skill.gain * (error * axis)


def skill_from_json_dict(doc: dict):
    """Build a relative skill from ``{type, gain, setpoint}``."""
    kind = doc.get("type")
    gain = doc["gain"]
    setpoint = np.atleast_1d(np.asarray(doc["setpoint"], dtype=float))
    if kind == "force":
        return ForceCouplingSkill(gain=gain, f_desired=setpoint)
    if kind == "distance":
        if setpoint.size == 1:
            left = right = float(setpoint[0])
        elif setpoint.size == 2:
            left, right = float(setpoint[0]), float(setpoint[1])
        else:
            raise ValueError("distance setpoint takes 1 or 2 values")
        return DistanceCouplingSkill(gain=gain, d_desired_left=left,
                                     d_desired_right=right)
    raise ValueError(f"unknown skill type {kind!r}")


def skill_to_json_dict(skill) -> dict:
    if isinstance(skill, ForceCouplingSkill):
        return {"type": "force", "gain": skill.gain.tolist(),
                "setpoint": skill.f_desired.tolist()}
    if isinstance(skill, DistanceCouplingSkill):
        return {"type": "distance", "gain": skill.gain.tolist(),
                "setpoint": [skill.d_desired_left, skill.d_desired_right]}
    raise ValueError(f"not a relative skill: {skill!r}")


def load_skill(path):
    with open(path) as fh:
        return skill_from_json_dict(json.load(fh))


def save_skill(skill, path) -> None:
    with open(path, "w") as fh:
        json.dump(skill_to_json_dict(skill), fh, indent=2, sort_keys=True)
        fh.write("\n")
