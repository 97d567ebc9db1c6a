"""Object-frame dynamical system encoding absolute primitive skills.

The motion of the manipulated object's frame toward its goal is modelled as
a critically damped spring-damper system, temporally scaled by ``tau`` and
modulated by a learned forcing term:

    tau * zdot = alpha * (beta * (g - x) - z) + f(k)
    tau * xdot = z

where ``z`` is the temporally scaled velocity. Writing the second-order
system this way keeps it critically damped for every ``tau`` when
``beta = alpha / 4`` and makes the spatial path invariant to time scaling.
The forcing term ``f`` is a normalized mixture of Gaussian basis functions
over the phase variable ``k``, which decays from 1 toward 0 under

    tau * kdot = -alpha_k * k

so the dynamics never depend on time explicitly. Fitting a skill from a
demonstration reduces to a linear least-squares problem in the mixture
weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasisError, DivergenceError
from .trajectory import Trajectory

DEFAULT_ALPHA = 25.0
DEFAULT_ALPHA_K = 8.0
DEFAULT_N_BASIS = 50
DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class DmpModel:
    """Spring-damper constants plus the RBF mixture encoding one skill.

    Invariants: ``alpha > 0``, ``beta = alpha / 4`` (critical damping),
    ``tau > 0``, ``alpha_k > 0``, widths positive, centers strictly
    decreasing (phase runs from 1 toward 0). ``weights`` has one row per
    basis and one column per DoF. Instances are immutable; arrays are
    copied and locked at construction.
    """

    alpha: float
    beta: float
    tau: float
    alpha_k: float
    centers: np.ndarray
    widths: np.ndarray
    weights: np.ndarray
    x0: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta", "tau", "alpha_k"):
            val = float(getattr(self, name))
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"{name} must be positive and finite")
            object.__setattr__(self, name, val)
        if abs(self.beta - self.alpha / 4.0) > 1e-12 * self.alpha:
            raise ValueError("critical damping requires beta = alpha / 4")
        centers = np.array(self.centers, dtype=float)
        widths = np.array(self.widths, dtype=float)
        weights = np.atleast_2d(np.array(self.weights, dtype=float))
        x0 = np.atleast_1d(np.array(self.x0, dtype=float))
        g = np.atleast_1d(np.array(self.g, dtype=float))
        n = centers.size
        if n < 1:
            raise ValueError("at least one basis function is required")
        if widths.shape != (n,) or np.any(widths <= 0):
            raise ValueError("widths must be positive, one per basis")
        if np.any(np.diff(centers) >= 0):
            raise ValueError("centers must be strictly decreasing in phase")
        if weights.shape[0] != n:
            raise ValueError("weights must have one row per basis")
        d = x0.size
        if not 1 <= d <= 3 or g.shape != (d,) or weights.shape[1] != d:
            raise ValueError("x0, g and weight columns must agree on dims")
        for name, arr in (("centers", centers), ("widths", widths),
                          ("weights", weights), ("x0", x0), ("g", g)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dims(self) -> int:
        return self.x0.size

    @property
    def n_basis(self) -> int:
        return self.centers.size

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "tau": self.tau,
            "alpha_k": self.alpha_k,
            "centers": self.centers.tolist(),
            "widths": self.widths.tolist(),
            "weights": self.weights.tolist(),
            "x0": self.x0.tolist(),
            "g": self.g.tolist(),
            "dims": self.dims,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DmpModel":
        model = cls(
            alpha=doc["alpha"], beta=doc["beta"], tau=doc["tau"],
            alpha_k=doc["alpha_k"], centers=doc["centers"],
            widths=doc["widths"], weights=doc["weights"],
            x0=doc["x0"], g=doc["g"],
        )
        if "dims" in doc and int(doc["dims"]) != model.dims:
            raise ValueError("dims field disagrees with x0/g length")
        return model

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "DmpModel":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def canonical_rollout(alpha_k: float, tau: float, dt: float,
                      n_steps: int) -> np.ndarray:
    """Integrate the phase decay ``tau * kdot = -alpha_k * k``.

    Explicit Euler from k = 1; returns ``n_steps`` strictly decreasing
    values in (0, 1]. The step must satisfy ``dt * alpha_k / tau < 1`` or
    the discrete phase would cross zero.
    """
    if alpha_k <= 0 or tau <= 0 or dt <= 0:
        raise ValueError("alpha_k, tau and dt must be positive")
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    decay = 1.0 - dt * alpha_k / tau
    if decay <= 0.0:
        raise ValueError(
            f"phase step dt*alpha_k/tau = {dt * alpha_k / tau:g} >= 1 "
            "is unstable; reduce dt or alpha_k")
    factors = np.full(n_steps, decay)
    factors[0] = 1.0
    return np.cumprod(factors)


def basis_layout(alpha_k: float, n_basis: int) -> tuple[np.ndarray, np.ndarray]:
    """Centers and widths for ``n_basis`` Gaussians over the phase range.

    Centers follow the canonical decay, ``c_i = exp(-alpha_k * i / (N-1))``,
    so the bases are equally spaced in time rather than in phase. Widths are
    the inverse squared gap to the next center, with the last width repeated.
    """
    if n_basis < 1:
        raise ValueError("n_basis must be >= 1")
    if n_basis == 1:
        return np.array([1.0]), np.array([1.0])
    idx = np.arange(n_basis)
    centers = np.exp(-alpha_k * idx / (n_basis - 1))
    gaps = np.diff(centers)
    widths = 1.0 / gaps**2
    widths = np.append(widths, widths[-1])
    return centers, widths


def _activations(model: DmpModel, k: np.ndarray) -> np.ndarray:
    return np.exp(-model.widths * (k[:, None] - model.centers) ** 2)


def forcing_table(model: DmpModel, k: np.ndarray) -> np.ndarray:
    """Evaluate the forcing term at every phase in ``k``; shape (n, dims)."""
    k = np.asarray(k, dtype=float)
    psi = _activations(model, k)
    denom = psi.sum(axis=1)
    dead = denom == 0.0
    if np.any(dead):
        raise DegenerateBasisError(
            f"all basis activations vanish at phase k={k[dead][0]:g}; "
            "centers/widths do not cover the phase range")
    return (psi @ model.weights) * (k / denom)[:, None]


def forcing_term(model: DmpModel, k: float, dof: int | None = None):
    """Normalized RBF mixture scaled by the phase ``k``.

    Returns the contribution for one DoF, or the full vector when ``dof``
    is None. Bounded by ``k * max|w|`` in magnitude.
    """
    if not 0.0 < k <= 1.0:
        raise ValueError("phase k must lie in (0, 1]")
    row = forcing_table(model, np.array([k]))[0]
    return row if dof is None else float(row[dof])


def fit_weights(demo: Trajectory, alpha: float = DEFAULT_ALPHA,
                alpha_k: float = DEFAULT_ALPHA_K,
                n_basis: int = DEFAULT_N_BASIS,
                tau: float | None = None) -> DmpModel:
    """Fit the forcing-term weights that reproduce a demonstration.

    The temporal scale defaults to the demo duration (override with
    ``tau`` when the recording includes a settling tail), the goal is the
    last sample and the start the first. For each DoF the target forcing
    is recovered by inverting the transformation system at the demo
    states,

        f_target = tau^2 * a - alpha * (beta * (g - x) - tau * v),

    and paired with the canonical phase at the same sample. The weights
    solve the resulting linear least-squares problem; a rank-deficient
    design matrix yields the minimum-norm solution rather than an error.
    Derivatives missing from the demo are filled by central differences.
    """
    if alpha <= 0 or alpha_k <= 0:
        raise ValueError("alpha and alpha_k must be positive")
    traj = demo.with_derivatives()
    if tau is None:
        tau = traj.duration
    elif tau <= 0:
        raise ValueError("tau must be positive")
    beta = alpha / 4.0
    x0 = traj.x[0].copy()
    g = traj.x[-1].copy()
    centers, widths = basis_layout(alpha_k, n_basis)
    k = canonical_rollout(alpha_k, tau, traj.dt, traj.n_samples)
    psi = np.exp(-widths * (k[:, None] - centers) ** 2)
    design = psi * (k / psi.sum(axis=1))[:, None]
    f_target = (tau**2 * traj.a
                - alpha * (beta * (g - traj.x) - tau * traj.v))
    weights, *_ = np.linalg.lstsq(design, f_target, rcond=None)
    return DmpModel(alpha=alpha, beta=beta, tau=tau, alpha_k=alpha_k,
                    centers=centers, widths=widths, weights=weights,
                    x0=x0, g=g)


def fit_rmse(model: DmpModel, demo: Trajectory) -> tuple[float, float]:
    """Rollout-vs-demo position RMSE and its ratio to the demo range."""
    demo = demo.with_derivatives()
    replay = rollout(model, dt=demo.dt, n_steps=demo.n_samples)
    err = replay.x - demo.x
    rmse = float(np.sqrt(np.mean(err**2)))
    span = float(demo.x.max() - demo.x.min())
    return rmse, rmse / span if span > 0 else np.inf


def rollout(model: DmpModel, x0=None, g=None, tau: float | None = None,
            dt: float = DEFAULT_DT, n_steps: int | None = None,
            couplings=()) -> Trajectory:
    """Integrate the transformation system by explicit Euler.

    Starts at ``x0`` with zero velocity. ``x0``, ``g`` and ``tau`` default
    to the model's stored values, so a plain ``rollout(model)`` replays the
    fitted skill; passing a new goal generalizes it. Each coupling is a
    callable ``(x, v, k) -> acceleration contribution`` added to the
    forcing term. Raises :class:`DivergenceError` naming the step index if
    the state stops being finite.
    """
    x0 = model.x0 if x0 is None else np.atleast_1d(np.asarray(x0, float))
    g = model.g if g is None else np.atleast_1d(np.asarray(g, float))
    tau = model.tau if tau is None else float(tau)
    if x0.shape != (model.dims,) or g.shape != (model.dims,):
        raise ValueError("x0 and g must match the model dims")
    if tau <= 0 or dt <= 0:
        raise ValueError("tau and dt must be positive")
    if n_steps is None:
        n_steps = int(round(tau / dt)) + 1
    n_steps = int(n_steps)
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")

    k = canonical_rollout(model.alpha_k, tau, dt, n_steps)
    forcing = forcing_table(model, k)
    alpha, beta = model.alpha, model.beta

    d = model.dims
    xs = np.empty((n_steps, d))
    vs = np.empty((n_steps, d))
    accs = np.empty((n_steps, d))
    x = x0.astype(float).copy()
    z = np.zeros(d)
    for i in range(n_steps):
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z))):
            raise DivergenceError(i)
        v = z / tau
        f = forcing[i]
        for coupling in couplings:
            f = f + coupling(x, v, k[i])
        zdot = (alpha * (beta * (g - x) - z) + f) / tau
        xs[i] = x
        vs[i] = v
        accs[i] = zdot / tau
        if not np.all(np.isfinite(zdot)):
            raise DivergenceError(i)
        if i + 1 < n_steps:
            x = x + dt * v
            z = z + dt * zdot
    return Trajectory(dt, xs, vs, accs)
