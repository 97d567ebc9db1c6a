"""Synthetic kinesthetic demonstrations and raw-trajectory preprocessing.

Recorded guidance data is noisy, jittered and position-only. The pipeline
here turns it into fit-ready trajectories: resample to a uniform grid,
knock out outliers with a Hampel filter, smooth with a zero-phase moving
average (no phase lag, so downstream steering-rate extraction stays
aligned) and differentiate twice by central differences. A PCA projection
to the two dominant directions is available for demos recorded in 3D.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import avoidance, dmp
from .errors import DegenerateDataError, InsufficientDataError
from .trajectory import CSV_FLOAT_FMT, Trajectory

DEFAULT_DEMO_DT = 0.01

PROFILES = ("min-jerk", "dmp-rollout")


@dataclass(frozen=True)
class RawDemo:
    """Raw recorded positions on a possibly jittered time base."""

    timestamps: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=float)
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim == 1:
            pos = pos[:, None]
        if t.ndim != 1 or pos.shape[0] != t.size:
            raise ValueError("timestamps and positions must align")
        if np.any(np.diff(t) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(pos))):
            raise ValueError("raw demo contains non-finite values")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "positions", pos)

    @property
    def n_samples(self) -> int:
        return self.timestamps.size

    @property
    def dims(self) -> int:
        return self.positions.shape[1]

    def to_csv(self, path) -> None:
        names = ["t"] + [f"x{i}" for i in range(self.dims)]
        data = np.column_stack([self.timestamps, self.positions])
        np.savetxt(path, data, fmt=CSV_FLOAT_FMT, delimiter=",",
                   header=",".join(names), comments="")

    @classmethod
    def from_csv(cls, path) -> "RawDemo":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        dims = len(header) - 1
        if header != ["t"] + [f"x{i}" for i in range(dims)] or dims < 1:
            raise ValueError(f"unrecognised raw demo header: {header}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1:])


def min_jerk(start, goal, duration: float, t: np.ndarray):
    """Quintic point-to-point profile; returns (x, v, a) arrays."""
    start = np.atleast_1d(np.asarray(start, dtype=float))
    goal = np.atleast_1d(np.asarray(goal, dtype=float))
    s = np.asarray(t, dtype=float)[:, None] / duration
    delta = goal - start
    x = start + delta * (10 * s**3 - 15 * s**4 + 6 * s**5)
    v = delta * (30 * s**2 - 60 * s**3 + 30 * s**4) / duration
    a = delta * (60 * s - 180 * s**2 + 120 * s**3) / duration**2
    return x, v, a


def generate_synthetic_demo(profile: str, start, goal, duration: float,
                            noise_sigma: float = 0.0, seed: int = 0,
                            dt: float = DEFAULT_DEMO_DT,
                            avoidance_setup: tuple | None = None,
                            timestamp_jitter: float = 0.0) -> RawDemo:
    """Produce a deterministic stand-in for a kinesthetic recording.

    ``profile`` selects the clean path: the quintic min-jerk polynomial or
    an unforced goal-attractor rollout. ``avoidance_setup`` is an optional
    ``(AvoidanceParams, Obstacle)`` pair; when present the clean path is
    produced by the corresponding dynamics with the steering coupling
    injected, so the perturbation carries a known style. Gaussian position
    noise and uniform timestamp jitter (both in units of the sample step)
    are applied afterwards from a generator seeded with ``seed``.
    """
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}")
    if duration <= 0 or dt <= 0:
        raise ValueError("duration and dt must be positive")
    start = np.atleast_1d(np.asarray(start, dtype=float))
    goal = np.atleast_1d(np.asarray(goal, dtype=float))
    n = int(round(duration / dt)) + 1
    t = np.arange(n) * dt

    couplings = ()
    if avoidance_setup is not None:
        params, obstacle = avoidance_setup
        couplings = (avoidance.make_coupling([obstacle], params),)

    if profile == "min-jerk":
        x, v, a = min_jerk(start, goal, duration, t)
        if couplings:
            base = dmp.fit_weights(Trajectory(dt, x, v, a))
            x = dmp.rollout(base, dt=dt, n_steps=n, couplings=couplings).x
    else:
        model = _unforced_model(start, goal, duration)
        x = dmp.rollout(model, dt=dt, n_steps=n, couplings=couplings).x

    rng = np.random.default_rng(seed)
    if timestamp_jitter > 0:
        if timestamp_jitter >= 0.5:
            raise ValueError("timestamp jitter must stay below half a step")
        t = t + rng.uniform(-timestamp_jitter, timestamp_jitter, n) * dt
        t[0] = 0.0
    if noise_sigma > 0:
        x = x + rng.normal(0.0, noise_sigma, x.shape)
    return RawDemo(t, x)


def _unforced_model(start, goal, duration) -> dmp.DmpModel:
    centers, widths = dmp.basis_layout(dmp.DEFAULT_ALPHA_K, 2)
    return dmp.DmpModel(
        alpha=dmp.DEFAULT_ALPHA, beta=dmp.DEFAULT_ALPHA / 4.0,
        tau=float(duration), alpha_k=dmp.DEFAULT_ALPHA_K,
        centers=centers, widths=widths,
        weights=np.zeros((2, len(start))), x0=start, g=goal)


@dataclass(frozen=True)
class PreprocessConfig:
    """Knobs for the raw-demo cleanup pipeline."""

    resample_dt: float | None = None
    hampel_window: int = 7
    hampel_nsigma: float = 3.0
    smooth_window: int = 9

    def __post_init__(self):
        if self.resample_dt is not None and self.resample_dt <= 0:
            raise ValueError("resample_dt must be positive")
        for name in ("hampel_window", "smooth_window"):
            val = int(getattr(self, name))
            if val < 1 or val % 2 == 0:
                raise ValueError(f"{name} must be a positive odd integer")
            object.__setattr__(self, name, val)
        if self.hampel_nsigma <= 0:
            raise ValueError("hampel_nsigma must be positive")

    @classmethod
    def from_file(cls, path) -> "PreprocessConfig":
        path = str(path)
        if path.endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        else:
            with open(path) as fh:
                doc = json.load(fh)
        return cls(**doc)


def _hampel(series: np.ndarray, window: int, nsigma: float) -> np.ndarray:
    """Replace spikes deviating more than nsigma scaled MADs from the
    windowed median."""
    half = window // 2
    out = series.copy()
    n = series.size
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        block = series[lo:hi]
        med = np.median(block)
        mad = np.median(np.abs(block - med))
        if np.abs(series[i] - med) > nsigma * 1.4826 * mad:
            out[i] = med
    return out


def _moving_average(series: np.ndarray, window: int) -> np.ndarray:
    if window <= 1:
        return series.copy()
    half = window // 2
    padded = np.concatenate([series[half:0:-1], series,
                             series[-2:-half - 2:-1]])
    kernel = np.ones(window)
    return np.convolve(padded, kernel, mode="valid") / window


def preprocess(raw: RawDemo, config: PreprocessConfig | None = None) -> Trajectory:
    """Turn a raw recording into a uniformly sampled, smooth trajectory.

    Steps, in order: linear-interpolation resampling to a uniform grid
    (step = configured value or the median raw step), Hampel outlier
    replacement, two passes of a centered moving average (zero phase), and
    double central differencing to fill velocities and accelerations.
    """
    config = config or PreprocessConfig()
    if raw.n_samples < 10:
        raise InsufficientDataError(
            f"preprocessing needs >= 10 samples, got {raw.n_samples}")
    dt = config.resample_dt
    if dt is None:
        dt = float(np.median(np.diff(raw.timestamps)))
    span = raw.timestamps[-1] - raw.timestamps[0]
    n = int(np.floor(span / dt)) + 1
    if n < 10:
        raise InsufficientDataError("resampled trajectory would be too short")
    t_uniform = raw.timestamps[0] + np.arange(n) * dt

    cleaned = np.empty((n, raw.dims))
    for dof in range(raw.dims):
        resampled = np.interp(t_uniform, raw.timestamps,
                              raw.positions[:, dof])
        filtered = _hampel(resampled, config.hampel_window,
                           config.hampel_nsigma)
        smooth = _moving_average(filtered, config.smooth_window)
        smooth = _moving_average(smooth, config.smooth_window)
        cleaned[:, dof] = smooth

    v = np.gradient(cleaned, dt, axis=0)
    a = np.gradient(v, dt, axis=0)
    return Trajectory(dt, cleaned, v, a)


@dataclass(frozen=True)
class Pca2dProjection:
    """Rank-2 principal-component view of a higher-dimensional trajectory."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    projected: Trajectory

    def __post_init__(self):
        gram = self.components @ self.components.T
        if not np.allclose(gram, np.eye(2), atol=1e-10):
            raise ValueError("component rows must be orthonormal")
        if self.explained_variance[0] < self.explained_variance[1]:
            raise ValueError("explained variance must be ordered")

    def transform(self, positions: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(positions) - self.mean) @ self.components.T

    def inverse_transform(self, projected: np.ndarray) -> np.ndarray:
        return self.mean + np.atleast_2d(projected) @ self.components


def pca_project(traj: Trajectory) -> Pca2dProjection:
    """Project a trajectory onto its two dominant position directions.

    Standard PCA: mean-center, eigendecompose the positional covariance,
    keep the top two eigenvectors. Eigenvector signs are fixed so the
    largest-magnitude entry is positive, making the output deterministic.
    Velocities and accelerations, when present, are rotated by the same
    basis.
    """
    if traj.dims < 2:
        raise ValueError("PCA projection needs at least 2 DoF")
    positions = traj.x
    mean = positions.mean(axis=0)
    centered = positions - mean
    cov = centered.T @ centered / (positions.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals[-1] <= 0 or not np.any(np.abs(centered) > 0):
        raise DegenerateDataError("positions carry no variance")
    order = np.argsort(eigvals)[::-1][:2]
    components = eigvecs[:, order].T
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    explained = eigvals[order]
    projected_x = centered @ components.T
    projected_v = traj.v @ components.T if traj.v is not None else None
    projected_a = traj.a @ components.T if traj.a is not None else None
    projected = Trajectory(traj.dt, projected_x, projected_v, projected_a)
    return Pca2dProjection(mean=mean, components=components,
                           explained_variance=explained, projected=projected)
