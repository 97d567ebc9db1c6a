"""Uniformly sampled trajectories, the common currency of demos and rollouts.

A :class:`Trajectory` stores position, velocity and acceleration samples for
1 to 3 degrees of freedom on a fixed time grid.  Velocities and accelerations
are optional at construction time; anything that needs them calls
:meth:`Trajectory.with_derivatives`, which fills the gaps with central finite
differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

CSV_FLOAT_FMT = "%.17g"


class StateTriplet(NamedTuple):
    """Position, velocity and acceleration vectors at a single sample."""

    x: np.ndarray
    v: np.ndarray
    a: np.ndarray


def _as_samples(arr, name: str, n: int | None, dims: int | None) -> np.ndarray:
    out = np.asarray(arr, dtype=float)
    if out.ndim == 1:
        out = out[:, None]
    if out.ndim != 2:
        raise ValueError(f"{name} must be a (n_samples, dims) array")
    if n is not None and out.shape[0] != n:
        raise ValueError(f"{name} has {out.shape[0]} samples, expected {n}")
    if dims is not None and out.shape[1] != dims:
        raise ValueError(f"{name} has {out.shape[1]} DoF, expected {dims}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite values")
    return out


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled motion of a point in a 1-3 DoF workspace.

    Attributes
    ----------
    dt : float
        Sample period in seconds, strictly positive and constant.
    x : ndarray, shape (n_samples, dims)
        Positions. At least 2 samples, 1 to 3 DoF.
    v, a : ndarray or None
        Velocities and accelerations on the same grid. May be omitted.
    """

    dt: float
    x: np.ndarray
    v: np.ndarray | None = None
    a: np.ndarray | None = None

    def __post_init__(self):
        if not np.isfinite(self.dt) or self.dt <= 0:
            raise ValueError("dt must be positive and finite")
        x = _as_samples(self.x, "x", None, None)
        if x.shape[0] < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        if not 1 <= x.shape[1] <= 3:
            raise ValueError("dims must be 1, 2 or 3")
        object.__setattr__(self, "x", x)
        n, d = x.shape
        for name in ("v", "a"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, _as_samples(val, name, n, d))

    @property
    def n_samples(self) -> int:
        return self.x.shape[0]

    @property
    def dims(self) -> int:
        return self.x.shape[1]

    @property
    def duration(self) -> float:
        return (self.n_samples - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt

    def sample(self, i: int) -> StateTriplet:
        """Full state at sample ``i``; requires derivatives to be present."""
        if self.v is None or self.a is None:
            raise ValueError("trajectory has no derivatives; "
                             "call with_derivatives() first")
        return StateTriplet(self.x[i], self.v[i], self.a[i])

    def with_derivatives(self) -> "Trajectory":
        """Return a trajectory with v and a filled in.

        Missing series are computed by central finite differences
        (one-sided at the ends). Present series are kept untouched.
        """
        if self.v is not None and self.a is not None:
            return self
        v = self.v
        if v is None:
            v = np.gradient(self.x, self.dt, axis=0)
        a = self.a
        if a is None:
            a = np.gradient(v, self.dt, axis=0)
        return Trajectory(self.dt, self.x, v, a)

    def to_csv(self, path) -> None:
        """Write ``t,dof0_x,dof0_v,dof0_a,...`` rows, one per sample."""
        full = self.with_derivatives()
        cols = [full.times]
        names = ["t"]
        for dof in range(full.dims):
            cols.extend([full.x[:, dof], full.v[:, dof], full.a[:, dof]])
            names.extend([f"dof{dof}_x", f"dof{dof}_v", f"dof{dof}_a"])
        data = np.column_stack(cols)
        np.savetxt(path, data, fmt=CSV_FLOAT_FMT, delimiter=",",
                   header=",".join(names), comments="")

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        expected = ["t"]
        dims = (len(header) - 1) // 3
        for dof in range(dims):
            expected.extend([f"dof{dof}_x", f"dof{dof}_v", f"dof{dof}_a"])
        if header != expected or len(header) < 4:
            raise ValueError(f"unrecognised trajectory header: {header}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t = data[:, 0]
        if len(t) < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        steps = np.diff(t)
        dt = steps[0]
        if not np.allclose(steps, dt, rtol=1e-6, atol=1e-12):
            raise ValueError("trajectory CSV is not uniformly sampled")
        x = data[:, 1::3]
        v = data[:, 2::3]
        a = data[:, 3::3]
        return cls(dt, x, v, a)
