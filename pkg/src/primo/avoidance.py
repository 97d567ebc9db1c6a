"""Steering-based obstacle avoidance and learning of its style parameters.

The coupling follows the human steering model: the acceleration
perturbation is the current velocity rotated a quarter turn about the axis
``r = (x_obstacle - x) x v`` and scaled by the turning rate

    theta_dot = gamma * theta * exp(-beta_oa * |theta|)

where ``theta`` is the angle between the velocity and the obstacle
direction. ``gamma`` sets how abruptly the system steers, ``beta_oa`` how
sensitive it is to small angles. Both parameters are recoverable from a
demonstration pair (with and without the obstacle) by log-linearizing the
turning-rate law into a two-parameter linear regression.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import dmp
from .errors import (InsufficientDataError, NonPhysicalFitError,
                     UndefinedSteeringError)
from .trajectory import Trajectory

EPS = 1e-9

# fraction of |obstacle - x| * |v| below which the rotation axis is
# treated as degenerate (velocity and obstacle direction parallel)
AXIS_TOL = 1e-12


@dataclass(frozen=True)
class AvoidanceParams:
    """Turning-rate magnitude and angular sensitivity of one style."""

    gamma: float
    beta_oa: float

    def __post_init__(self):
        for name in ("gamma", "beta_oa"):
            val = float(getattr(self, name))
            if not math.isfinite(val) or val <= 0:
                raise ValueError(f"{name} must be positive and finite")
            object.__setattr__(self, name, val)

    def to_json_dict(self) -> dict:
        return {"gamma": self.gamma, "beta_oa": self.beta_oa}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "AvoidanceParams":
        return cls(gamma=doc["gamma"], beta_oa=doc["beta_oa"])

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "AvoidanceParams":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class Obstacle:
    """Point obstacle; the radius only feeds clearance metrics."""

    position: np.ndarray
    radius: float = 0.0

    def __post_init__(self):
        pos = np.atleast_1d(np.asarray(self.position, dtype=float))
        if pos.ndim != 1 or not 1 <= pos.size <= 3:
            raise ValueError("obstacle position must have 1 to 3 components")
        if not np.all(np.isfinite(pos)):
            raise ValueError("obstacle position must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "position", pos)
        radius = float(self.radius)
        if not math.isfinite(radius) or radius < 0:
            raise ValueError("obstacle radius must be finite and >= 0")
        object.__setattr__(self, "radius", radius)


def _embed3(vec: np.ndarray) -> np.ndarray:
    out = np.zeros(3)
    out[:vec.size] = vec
    return out


def steering_angle(x, v, obstacle: Obstacle) -> float:
    """Unsigned angle in [0, pi] between the velocity and the obstacle direction."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    diff = obstacle.position - x
    speed = np.linalg.norm(v)
    dist = np.linalg.norm(diff)
    if speed <= EPS:
        raise UndefinedSteeringError("velocity magnitude below threshold")
    if dist <= EPS:
        raise UndefinedSteeringError("obstacle coincides with the position")
    cos_theta = np.dot(v, diff) / (speed * dist)
    return float(np.arccos(np.clip(cos_theta, -1.0, 1.0)))


def turning_rate(theta: float, params: AvoidanceParams) -> float:
    """gamma * theta * exp(-beta_oa * |theta|); peaks at theta = 1/beta_oa."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    return params.gamma * theta * math.exp(-params.beta_oa * abs(theta))


def _fallback_axis(v_unit: np.ndarray) -> np.ndarray:
    """Lowest-index coordinate axis orthogonalized against ``v_unit``."""
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        proj = e - np.dot(e, v_unit) * v_unit
        norm = np.linalg.norm(proj)
        if norm > 1e-6:
            return proj / norm
    raise AssertionError("unreachable: v_unit cannot shadow every axis")


def _rotated_direction(diff3: np.ndarray, v3: np.ndarray, theta: float,
                       dims: int) -> np.ndarray | None:
    """Unit vector R v_hat (quarter turn of v about (x_obs - x) x v).

    Returns None when the axis is degenerate with theta = 0 (coupling is
    zero there anyway). For theta = pi the axis is undefined; in 2D the
    out-of-plane normal is used, in 3D the lowest-index coordinate axis
    orthogonalized against v.
    """
    speed = np.linalg.norm(v3)
    axis = np.cross(diff3, v3)
    norm = np.linalg.norm(axis)
    if norm <= AXIS_TOL * np.linalg.norm(diff3) * speed or norm == 0.0:
        if theta < math.pi / 2:
            return None
        if dims == 2:
            axis = np.array([0.0, 0.0, 1.0])
        else:
            axis = _fallback_axis(v3 / speed)
    else:
        axis = axis / norm
    # axis is perpendicular to v, so the quarter turn collapses to a cross product
    return np.cross(axis, v3 / speed)


def avoidance_coupling(x, v, obstacle: Obstacle,
                       params: AvoidanceParams) -> np.ndarray:
    """Acceleration contribution R v theta_dot steering away from a point obstacle.

    Perpendicular to the velocity with magnitude |v| * turning_rate(theta).
    Degenerate situations (no motion, coincident obstacle, obstacle dead
    ahead) return the zero vector instead of raising.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    d = x.size
    if d not in (2, 3):
        raise ValueError("avoidance coupling needs a 2D or 3D workspace")
    zero = np.zeros(d)
    diff = obstacle.position - x
    speed = np.linalg.norm(v)
    if speed <= EPS or np.linalg.norm(diff) <= EPS:
        return zero
    theta = steering_angle(x, v, obstacle)
    rate = turning_rate(theta, params)
    if rate == 0.0:
        return zero
    direction = _rotated_direction(_embed3(diff), _embed3(v), theta, d)
    if direction is None:
        return zero
    return direction[:d] * (speed * rate)


def make_coupling(obstacles, params: AvoidanceParams,
                  influence_radius: float | None = None):
    """Coupling callback for :func:`primo.dmp.rollout`, summed over obstacles.

    Obstacles farther than ``influence_radius`` are skipped entirely when
    the radius is set; by default every obstacle contributes.
    """
    obstacles = tuple(obstacles)

    def coupling(x, v, k):
        total = np.zeros(np.atleast_1d(x).size)
        for obstacle in obstacles:
            if influence_radius is not None:
                if np.linalg.norm(obstacle.position - x) > influence_radius:
                    continue
            total += avoidance_coupling(x, v, obstacle, params)
        return total

    return coupling


def extract_turning_series(demo_obs: Trajectory, demo_base: Trajectory,
                           obstacle: Obstacle,
                           alpha: float = dmp.DEFAULT_ALPHA,
                           speed_floor: float = 0.0,
                           ahead_only: bool = True) -> np.ndarray:
    """Recover (theta, theta_dot) pairs from an avoidance demonstration.

    At each sample the forcing realized by the perturbed demo is compared
    with the forcing realized by the unperturbed one at the same instant;
    since the two tasks differ only by the obstacle, the residual is the
    steering perturbation. Projecting it onto the unit steering direction
    R v_hat and dividing by the speed yields the experienced turning rate,
    paired with the steering angle at that sample. Differencing the two
    recordings (rather than predicting the baseline from a fitted model)
    lets the shared differentiation bias cancel.

    Samples are dropped when steering is undefined, when the speed falls
    below ``speed_floor`` times the peak speed (turning rates blow up as
    1/speed), and, with ``ahead_only``, when the obstacle lies behind the
    motion; steering toward an obstacle already passed carries no
    avoidance information. Returns an (n, 2) array of (theta, theta_dot)
    rows.
    """
    if abs(demo_obs.dt - demo_base.dt) > 1e-9 * demo_base.dt:
        raise ValueError("demo pair must share the sample period")
    if demo_obs.dims != demo_base.dims:
        raise ValueError("demo pair must share the workspace dims")
    if not 0.0 <= speed_floor < 1.0:
        raise ValueError("speed_floor is a fraction of the peak speed")
    obs = demo_obs.with_derivatives()
    base = demo_base.with_derivatives()
    n = min(obs.n_samples, base.n_samples)
    beta = alpha / 4.0
    tau = base.duration
    goal = base.x[-1]
    floor = max(speed_floor * np.linalg.norm(obs.v, axis=1).max(), EPS)
    rows = []
    for i in range(n):
        x, v, acc = obs.sample(i)
        x_b, v_b, acc_b = base.sample(i)
        speed = np.linalg.norm(v)
        diff = obstacle.position - x
        if speed <= floor or np.linalg.norm(diff) <= EPS:
            continue
        if ahead_only and np.dot(v, diff) <= 0.0:
            continue
        theta = steering_angle(x, v, obstacle)
        direction = _rotated_direction(_embed3(diff), _embed3(v), theta,
                                       obs.dims)
        if direction is None:
            continue
        f_obs = tau**2 * acc - alpha * (beta * (goal - x) - tau * v)
        f_base = tau**2 * acc_b - alpha * (beta * (goal - x_b) - tau * v_b)
        rate = np.dot(_embed3(f_obs - f_base), direction) / speed
        rows.append((theta, rate))
    if len(rows) < 3:
        raise InsufficientDataError(
            f"only {len(rows)} usable samples in the demo pair")
    return np.array(rows)


def learn_params(series: np.ndarray, theta_min: float = EPS,
                 rate_min: float = EPS) -> AvoidanceParams:
    """Fit (gamma, beta_oa) to sampled (theta, theta_dot) pairs.

    Log-linearizing the turning-rate law with the log-theta coefficient
    pinned to one leaves the two-parameter regression

        log theta_dot - log theta = log gamma - beta_oa * theta

    solved by batch least squares. Samples need positive theta and
    turning rate for the logs; negative rates enter by magnitude (their
    sign lives in the rotation direction). Rejects fits with
    ``beta_oa <= 0`` or with no usable theta variation.
    """
    series = np.asarray(series, dtype=float)
    if series.ndim != 2 or series.shape[1] != 2:
        raise ValueError("series must be an (n, 2) array of (theta, rate)")
    theta = series[:, 0]
    rate = np.abs(series[:, 1])
    mask = (theta > theta_min) & (rate > rate_min) & np.isfinite(theta) \
        & np.isfinite(rate)
    theta = theta[mask]
    rate = rate[mask]
    if theta.size < 3:
        raise InsufficientDataError(
            f"only {theta.size} samples usable for the log regression")
    if np.ptp(theta) <= theta_min:
        raise NonPhysicalFitError("theta carries no variation; "
                                  "sensitivity is unidentifiable")
    y = np.log(rate) - np.log(theta)
    design = np.column_stack([np.ones_like(theta), -theta])
    (log_gamma, beta_oa), *_ = np.linalg.lstsq(design, y, rcond=None)
    if beta_oa <= 0:
        raise NonPhysicalFitError(
            f"fitted sensitivity beta_oa = {beta_oa:g} is not positive")
    return AvoidanceParams(gamma=float(np.exp(log_gamma)),
                           beta_oa=float(beta_oa))


def steering_fit_r2(series: np.ndarray, params: AvoidanceParams,
                    theta_min: float = EPS, rate_min: float = EPS) -> float:
    """Coefficient of determination of the log-linear fit on ``series``."""
    series = np.asarray(series, dtype=float)
    theta = series[:, 0]
    rate = np.abs(series[:, 1])
    mask = (theta > theta_min) & (rate > rate_min)
    theta = theta[mask]
    y = np.log(rate[mask]) - np.log(theta)
    pred = np.log(params.gamma) - params.beta_oa * theta
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot
