"""Closed-chain rollout of composed skills on a scene.

End-effectors are velocity-controlled points rigidly coupled to the object
through the grasp geometry; there is no joint-space model or physics
engine. Per step the pipeline advances each absolute skill's dynamics
(with steering couplings), evaluates the relative corrections, merges
everything at the velocity level and transports the result to both
contacts. Rollouts are deterministic functions of the scene and library.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import avoidance as oa
from . import dmp
from .composition import SkillLibrary, merge
from .errors import DivergenceError, PrimoError
from .grasp import GraspConfig, Twist
from .maintenance import (DistanceCouplingSkill, ForceCouplingSkill,
                          distance_correction)
from .trajectory import CSV_FLOAT_FMT, Trajectory

DEFAULT_GOAL_TOLERANCE = 1e-3

# explicit-Euler stability margin for the stiffest spring-damper mode
STABILITY_FACTOR = 0.1


@dataclass(frozen=True)
class WeightPhase:
    """Piecewise-constant merge weights from ``t_start`` onward."""

    t_start: float
    w_abs: tuple[float, ...]
    w_rel: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "w_abs", tuple(float(w) for w in self.w_abs))
        object.__setattr__(self, "w_rel", tuple(float(w) for w in self.w_rel))
        weights = self.w_abs + self.w_rel
        if any(w < 0 or not np.isfinite(w) for w in weights):
            raise ValueError("weights must be finite and >= 0")
        if not any(w > 0 for w in weights):
            raise ValueError("every phase needs at least one active skill")


@dataclass(frozen=True)
class Disturbance:
    """One-off inward squeeze of both contacts at a given time."""

    time: float
    squeeze: float


@dataclass(frozen=True)
class Scene:
    """Geometry, timing and weight schedule of one rollout."""

    dims: int
    start: np.ndarray
    goal: np.ndarray
    grasp: GraspConfig
    obstacles: tuple[oa.Obstacle, ...] = ()
    dt: float = dmp.DEFAULT_DT
    horizon: float = 5.0
    schedule: tuple[WeightPhase, ...] = ()
    goal_tolerance: float = DEFAULT_GOAL_TOLERANCE
    influence_radius: float | None = None
    disturbance: Disturbance | None = None
    mode: str = "pick-and-place"

    def __post_init__(self):
        if self.dims not in (2, 3):
            raise ValueError("scene dims must be 2 or 3")
        start = np.asarray(self.start, dtype=float)
        goal = np.asarray(self.goal, dtype=float)
        if start.shape != (self.dims,) or goal.shape != (self.dims,):
            raise ValueError("start and goal must match the scene dims")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "goal", goal)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if self.dt <= 0 or self.horizon <= 0:
            raise ValueError("dt and horizon must be positive")
        schedule = tuple(self.schedule)
        if schedule:
            starts = [p.t_start for p in schedule]
            if starts != sorted(starts) or starts[0] > 0:
                raise ValueError("schedule must be sorted and cover t = 0")
        object.__setattr__(self, "schedule", schedule)
        if self.mode not in ("pick-and-place", "pick-and-raise"):
            raise ValueError(f"unknown scene mode {self.mode!r}")

    def to_json_dict(self) -> dict:
        doc = {
            "dims": self.dims,
            "start": self.start.tolist(),
            "goal": self.goal.tolist(),
            "grasp": self.grasp.to_json_dict(),
            "obstacles": [
                {"position": ob.position.tolist(), "radius": ob.radius}
                for ob in self.obstacles
            ],
            "dt": self.dt,
            "horizon": self.horizon,
            "weights": [
                {"t_start": p.t_start, "w_abs": list(p.w_abs),
                 "w_rel": list(p.w_rel)}
                for p in self.schedule
            ],
            "goal_tolerance": self.goal_tolerance,
            "influence_radius": self.influence_radius,
            "mode": self.mode,
        }
        if self.disturbance is not None:
            doc["disturbance"] = {"time": self.disturbance.time,
                                  "squeeze": self.disturbance.squeeze}
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Scene":
        disturbance = None
        if doc.get("disturbance") is not None:
            disturbance = Disturbance(time=doc["disturbance"]["time"],
                                      squeeze=doc["disturbance"]["squeeze"])
        return cls(
            dims=int(doc["dims"]),
            start=doc["start"],
            goal=doc["goal"],
            grasp=GraspConfig.from_json_dict(doc["grasp"]),
            obstacles=tuple(
                oa.Obstacle(ob["position"], ob.get("radius", 0.0))
                for ob in doc.get("obstacles", [])
            ),
            dt=float(doc.get("dt", dmp.DEFAULT_DT)),
            horizon=float(doc.get("horizon", 5.0)),
            schedule=tuple(
                WeightPhase(p["t_start"], tuple(p["w_abs"]),
                            tuple(p.get("w_rel", ())))
                for p in doc.get("weights", [])
            ),
            goal_tolerance=float(doc.get("goal_tolerance",
                                         DEFAULT_GOAL_TOLERANCE)),
            influence_radius=doc.get("influence_radius"),
            disturbance=disturbance,
            mode=doc.get("mode", "pick-and-place"),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Scene":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class Metrics:
    """Task metrics of one rollout; all recomputable from the logged series."""

    goal_error: float
    min_clearance: float | None
    max_grasp_deviation: float
    success: bool

    def to_json_dict(self) -> dict:
        return {
            "goal_error": self.goal_error,
            "min_clearance": self.min_clearance,
            "max_grasp_deviation": self.max_grasp_deviation,
            "success": self.success,
        }


@dataclass(frozen=True)
class RolloutLog:
    """Full record of one scene execution."""

    scene: Scene
    object: Trajectory
    left: Trajectory
    right: Trajectory
    commands: np.ndarray
    deviations: np.ndarray
    d_desired: tuple[float, float]
    metrics: Metrics

    def recompute_metrics(self) -> Metrics:
        """Re-derive the metrics from the logged series."""
        return _metrics_from_series(self.scene, self.object.x, self.left.x,
                                    self.right.x, self.d_desired)

    def export(self, outdir) -> None:
        """Write the CSV/JSON bundle consumed by plotting and scripting."""
        import os

        os.makedirs(outdir, exist_ok=True)
        self.object.to_csv(os.path.join(outdir, "object.csv"))
        self.left.to_csv(os.path.join(outdir, "left.csv"))
        self.right.to_csv(os.path.join(outdir, "right.csv"))
        times = self.object.times
        names = ["t"]
        for side in ("left", "right"):
            names += [f"{side}_v{c}" for c in "xyz"]
            names += [f"{side}_w{c}" for c in "xyz"]
        np.savetxt(os.path.join(outdir, "commands.csv"),
                   np.column_stack([times, self.commands]),
                   fmt=CSV_FLOAT_FMT, delimiter=",",
                   header=",".join(names), comments="")
        np.savetxt(os.path.join(outdir, "grasp_deviation.csv"),
                   np.column_stack([times, self.deviations]),
                   fmt=CSV_FLOAT_FMT, delimiter=",",
                   header="t,dev_left,dev_right", comments="")
        with open(os.path.join(outdir, "metrics.json"), "w") as fh:
            json.dump(self.metrics.to_json_dict(), fh, indent=2,
                      sort_keys=True)
            fh.write("\n")
        self.scene.save(os.path.join(outdir, "scene.json"))


@dataclass
class BatchResult:
    """Outcome of one entry of a batch run."""

    index: int
    log: RolloutLog | None = None
    error: str | None = None


def _embed3(vec: np.ndarray) -> np.ndarray:
    out = np.zeros(3)
    out[:vec.size] = vec
    return out


def _metrics_from_series(scene: Scene, obj_x, left_x, right_x,
                         d_desired) -> Metrics:
    goal_error = float(np.linalg.norm(obj_x[-1] - scene.goal))
    min_clearance = None
    clearance_ok = True
    if scene.obstacles:
        per_obstacle = []
        for ob in scene.obstacles:
            dist = np.linalg.norm(obj_x - ob.position, axis=1)
            closest = float(dist.min())
            per_obstacle.append(closest)
            if closest <= ob.radius:
                clearance_ok = False
        min_clearance = min(per_obstacle)
    obj3 = np.column_stack([obj_x, np.zeros((obj_x.shape[0],
                                             3 - obj_x.shape[1]))])
    dev_left = np.abs(np.linalg.norm(left_x - obj3[:, :left_x.shape[1]],
                                     axis=1) - d_desired[0])
    dev_right = np.abs(np.linalg.norm(right_x - obj3[:, :right_x.shape[1]],
                                      axis=1) - d_desired[1])
    max_dev = float(max(dev_left.max(), dev_right.max()))
    success = clearance_ok and goal_error < scene.goal_tolerance
    return Metrics(goal_error=goal_error, min_clearance=min_clearance,
                   max_grasp_deviation=max_dev, success=success)


def _weights_at(scene: Scene, library: SkillLibrary, t: float):
    if not scene.schedule:
        return library.weights_abs, library.weights_rel
    active = scene.schedule[0]
    for phase in scene.schedule:
        if phase.t_start <= t:
            active = phase
        else:
            break
    w_abs = np.asarray(active.w_abs, dtype=float)
    w_rel = np.asarray(active.w_rel, dtype=float)
    if w_abs.shape != library.weights_abs.shape \
            or w_rel.shape != library.weights_rel.shape:
        raise ValueError("schedule weight lengths disagree with the library")
    return w_abs, w_rel


def _validate(scene: Scene, library: SkillLibrary) -> None:
    if not library.absolute and not library.relative:
        raise ValueError("the skill library is empty")
    for skill in library.absolute:
        model = skill.model
        if model.dims != scene.dims:
            raise ValueError("absolute skill dims disagree with the scene")
        if scene.dt > STABILITY_FACTOR * model.tau / model.alpha:
            raise ValueError(
                f"dt = {scene.dt:g} violates the stability bound "
                f"{STABILITY_FACTOR:g} * tau / alpha = "
                f"{STABILITY_FACTOR * model.tau / model.alpha:g}")
    for skill in library.relative:
        if isinstance(skill, ForceCouplingSkill):
            raise ValueError("force-based skills need force measurements; "
                             "the kinematic simulator only supports the "
                             "distance form")


def run_scene(scene: Scene, library: SkillLibrary) -> RolloutLog:
    """Execute the full pipeline on a scene and log everything.

    Per step: advance each absolute skill's phase and transformation
    system (steering couplings included), evaluate the relative distance
    corrections, merge all contributions at the velocity level, transport
    to the contacts and integrate object and contact positions by explicit
    Euler. Obstacle contact is recorded in the metrics, never an abort;
    a non-finite state aborts with the offending step index.
    """
    _validate(scene, library)
    n_steps = int(round(scene.horizon / scene.dt)) + 1
    dt = scene.dt
    d = scene.dims

    skills = library.absolute
    n_abs = len(skills)
    phases = []
    forcings = []
    couplers = []
    for skill in skills:
        model = skill.model
        k = dmp.canonical_rollout(model.alpha_k, model.tau, dt, n_steps)
        phases.append(k)
        forcings.append(dmp.forcing_table(model, k))
        if skill.avoidance is not None and scene.obstacles:
            couplers.append(oa.make_coupling(scene.obstacles, skill.avoidance,
                                             scene.influence_radius))
        else:
            couplers.append(None)

    xs = [scene.start.copy() for _ in skills]
    zs = [np.zeros(d) for _ in skills]
    goal = scene.goal

    x_obj = scene.start.copy()
    p_left = _embed3(scene.start) + scene.grasp.r_left
    p_right = _embed3(scene.start) + scene.grasp.r_right

    distance_skills = [s for s in library.relative
                       if isinstance(s, DistanceCouplingSkill)]
    if distance_skills:
        d_desired = (distance_skills[0].d_desired_left,
                     distance_skills[0].d_desired_right)
    else:
        d_desired = (float(np.linalg.norm(scene.grasp.r_left)),
                     float(np.linalg.norm(scene.grasp.r_right)))

    obj_x = np.empty((n_steps, d))
    obj_v = np.empty((n_steps, d))
    obj_a = np.empty((n_steps, d))
    left_x = np.empty((n_steps, 3))
    right_x = np.empty((n_steps, 3))
    commands = np.empty((n_steps, 12))
    deviations = np.empty((n_steps, 2))

    disturbance_pending = scene.disturbance is not None

    for i in range(n_steps):
        t = i * dt
        state = np.concatenate([x_obj, p_left, p_right]
                               + [np.concatenate([xs[j], zs[j]])
                                  for j in range(n_abs)])
        if not np.all(np.isfinite(state)):
            raise DivergenceError(i)
        if disturbance_pending and t >= scene.disturbance.time:
            obj3 = _embed3(x_obj)
            for point in (p_left, p_right):
                axis = point - obj3
                norm = np.linalg.norm(axis)
                if norm > 0:
                    point -= scene.disturbance.squeeze * axis / norm
            disturbance_pending = False

        w_abs, w_rel = _weights_at(scene, library, t)

        abs_twists = []
        a_abs = np.zeros(d)
        zdots = []
        for j, skill in enumerate(skills):
            model = skill.model
            v_j = zs[j] / model.tau
            f = forcings[j][i]
            if couplers[j] is not None:
                f = f + couplers[j](xs[j], v_j, phases[j][i])
            zdot = (model.alpha * (model.beta * (goal - xs[j]) - zs[j])
                    + f) / model.tau
            zdots.append(zdot)
            abs_twists.append(Twist.pure_linear(_embed3(v_j)))
            a_abs += w_abs[j] * (zdot / model.tau)

        obj3 = _embed3(x_obj)
        rel_pairs = []
        for skill in library.relative:
            pair = []
            for point, side in ((p_left, "left"), (p_right, "right")):
                offset = point - obj3
                dist = np.linalg.norm(offset)
                if dist > 0:
                    corr = distance_correction(skill, side, dist,
                                               offset / dist)
                else:
                    corr = np.zeros(3)
                pair.append(Twist.pure_linear(corr))
            rel_pairs.append(tuple(pair))

        command = merge(scene.grasp, abs_twists, w_abs, rel_pairs, w_rel)

        v_obj = np.zeros(d)
        for j in range(n_abs):
            v_obj += w_abs[j] * (zs[j] / skills[j].model.tau)

        obj_x[i] = x_obj
        obj_v[i] = v_obj
        obj_a[i] = a_abs
        left_x[i] = p_left
        right_x[i] = p_right
        commands[i] = command.as_vector()
        deviations[i] = (
            abs(np.linalg.norm(p_left - obj3) - d_desired[0]),
            abs(np.linalg.norm(p_right - obj3) - d_desired[1]),
        )

        if not np.all(np.isfinite(commands[i])):
            raise DivergenceError(i)

        if i + 1 < n_steps:
            x_obj = x_obj + dt * v_obj
            p_left = p_left + dt * command.v_left.linear
            p_right = p_right + dt * command.v_right.linear
            for j in range(n_abs):
                xs[j] = xs[j] + dt * (zs[j] / skills[j].model.tau)
                zs[j] = zs[j] + dt * zdots[j]

    left_v = np.gradient(left_x, dt, axis=0)
    right_v = np.gradient(right_x, dt, axis=0)
    log = RolloutLog(
        scene=scene,
        object=Trajectory(dt, obj_x, obj_v, obj_a),
        left=Trajectory(dt, left_x, left_v,
                        np.gradient(left_v, dt, axis=0)),
        right=Trajectory(dt, right_x, right_v,
                         np.gradient(right_v, dt, axis=0)),
        commands=commands,
        deviations=deviations,
        d_desired=d_desired,
        metrics=_metrics_from_series(scene, obj_x, left_x, right_x,
                                     d_desired),
    )
    return log


def run_pick_and_raise(scene: Scene, library: SkillLibrary) -> RolloutLog:
    """Raise variant: requires an always-active distance grasp skill."""
    has_distance = any(isinstance(s, DistanceCouplingSkill)
                       for s in library.relative)
    if not has_distance:
        raise ValueError("pick-and-raise needs a distance grasp skill")
    if scene.schedule:
        for phase in scene.schedule:
            if not any(w > 0 for w in phase.w_rel):
                raise ValueError("the grasp skill must stay active "
                                 "throughout a pick-and-raise")
    elif not np.any(library.weights_rel > 0):
        raise ValueError("the grasp skill must stay active "
                         "throughout a pick-and-raise")
    if scene.mode != "pick-and-raise":
        scene = replace(scene, mode="pick-and-raise")
    return run_scene(scene, library)


def run(scene: Scene, library: SkillLibrary) -> RolloutLog:
    """Dispatch on ``scene.mode``."""
    if scene.mode == "pick-and-raise":
        return run_pick_and_raise(scene, library)
    return run_scene(scene, library)


def batch_run(scenes, library: SkillLibrary) -> list[BatchResult]:
    """Run independent scenes sequentially; per-scene errors are isolated."""
    results = []
    for index, scene in enumerate(scenes):
        try:
            results.append(BatchResult(index=index, log=run(scene, library)))
        except (PrimoError, ValueError) as err:
            results.append(BatchResult(index=index, error=str(err)))
    return results
