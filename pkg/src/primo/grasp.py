"""Grasp matrices: mapping object-frame twists to contact-point twists."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def _vec3(value, name: str) -> np.ndarray:
    out = np.atleast_1d(np.asarray(value, dtype=float))
    if out.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite values")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Twist:
    """Stacked linear (m/s) and angular (rad/s) velocity of a frame."""

    linear: np.ndarray
    angular: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "linear", _vec3(self.linear, "linear"))
        object.__setattr__(self, "angular", _vec3(self.angular, "angular"))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.linear, self.angular])

    @classmethod
    def from_vector(cls, vec) -> "Twist":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (6,):
            raise ValueError("a twist vector has 6 components")
        return cls(vec[:3], vec[3:])

    @classmethod
    def pure_linear(cls, linear) -> "Twist":
        return cls(linear, np.zeros(3))


@dataclass(frozen=True)
class GraspConfig:
    """Offsets from the object frame to each arm's contact point."""

    r_left: np.ndarray
    r_right: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "r_left", _vec3(self.r_left, "r_left"))
        object.__setattr__(self, "r_right", _vec3(self.r_right, "r_right"))
        if self.symmetric and not np.allclose(self.r_left, -self.r_right):
            raise ValueError("symmetric grasp requires r_left = -r_right")

    def offset(self, side: str) -> np.ndarray:
        if side == "left":
            return self.r_left
        if side == "right":
            return self.r_right
        raise ValueError(f"unknown side {side!r}")

    def to_json_dict(self) -> dict:
        return {"r_left": self.r_left.tolist(),
                "r_right": self.r_right.tolist()}

    @classmethod
    def from_json_dict(cls, doc: dict, symmetric: bool = False) -> "GraspConfig":
        return cls(doc["r_left"], doc["r_right"], symmetric=symmetric)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def skew(r) -> np.ndarray:
    """Skew-symmetric matrix S with S @ u = r x u."""
    r = _vec3(r, "r")
    return np.array([
        [0.0, -r[2], r[1]],
        [r[2], 0.0, -r[0]],
        [-r[1], r[0], 0.0],
    ])


def grasp_matrix(r) -> np.ndarray:
    """6x6 grasp matrix [[I, 0], [S(r), I]]; unit-triangular, always invertible."""
    mat = np.eye(6)
    mat[3:, :3] = skew(r)
    return mat


def contact_twist(r, object_twist: Twist) -> Twist:
    """Transport an object twist to the contact at offset ``r`` (G^T map).

    The angular part passes through; the linear part picks up the
    rigid-body term ``omega x r``.
    """
    vec = grasp_matrix(r).T @ object_twist.as_vector()
    return Twist.from_vector(vec)


def global_grasp_map(config: GraspConfig) -> np.ndarray:
    """6x12 map [G_left  G_right] for the dual-arm closed chain."""
    return np.hstack([grasp_matrix(config.r_left),
                      grasp_matrix(config.r_right)])
