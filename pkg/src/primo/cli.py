"""Command line front end: generate demos, learn skills, run scenes.

Exit codes are a stable scripting contract: 0 success, 2 usage error,
3 numerical failure, 4 data insufficiency. All randomness funnels through
``--seed``; re-running any command with the same inputs overwrites
byte-identical outputs.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click
import numpy as np

from . import avoidance as oa
from . import demos, dmp, simulator
from .composition import AbsoluteSkill, SkillLibrary
from .errors import DivergenceError, PrimoError
from .grasp import GraspConfig
from .maintenance import load_skill
from .trajectory import Trajectory


def _parse_point(text: str, name: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise click.UsageError(f"{name} must be comma-separated numbers")
    if not 1 <= len(values) <= 3:
        raise click.UsageError(f"{name} must have 1 to 3 components")
    return np.array(values)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DivergenceError as err:
            click.echo(f"numerical failure: {err} (step {err.step})",
                       err=True)
            sys.exit(err.exit_code)
        except PrimoError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(err.exit_code)
        except (ValueError, OSError) as err:
            raise click.UsageError(str(err))
    return wrapper


@click.group()
@click.version_option(package_name="primo")
def main():
    """Learn primitive motion skills from demos and roll them out."""


@main.command("gen-demo")
@click.option("--profile", type=click.Choice(demos.PROFILES),
              default="min-jerk", show_default=True)
@click.option("--from", "start", required=True,
              help="Start position, e.g. 0,0")
@click.option("--to", "goal", required=True, help="Goal position")
@click.option("--duration", type=float, default=1.0, show_default=True)
@click.option("--dt", type=float, default=demos.DEFAULT_DEMO_DT,
              show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Position noise sigma in meters")
@click.option("--jitter", type=float, default=0.0, show_default=True,
              help="Timestamp jitter as a fraction of dt")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--avoid-obstacle", default=None,
              help="Inject a steering perturbation around this point")
@click.option("--gamma", type=float, default=1000.0, show_default=True)
@click.option("--beta-oa", type=float, default=20.0 / np.pi,
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_handle_errors
def cmd_gen_demo(profile, start, goal, duration, dt, noise, jitter, seed,
                 avoid_obstacle, gamma, beta_oa, out):
    """Write a synthetic kinesthetic demonstration as CSV."""
    start = _parse_point(start, "--from")
    goal = _parse_point(goal, "--to")
    if start.size != goal.size:
        raise click.UsageError("--from and --to must have the same dims")
    setup = None
    if avoid_obstacle is not None:
        obstacle = oa.Obstacle(_parse_point(avoid_obstacle,
                                            "--avoid-obstacle"))
        setup = (oa.AvoidanceParams(gamma=gamma, beta_oa=beta_oa), obstacle)
    demo = demos.generate_synthetic_demo(
        profile, start, goal, duration, noise_sigma=noise, seed=seed,
        dt=dt, avoidance_setup=setup, timestamp_jitter=jitter)
    demo.to_csv(out)
    click.echo(f"wrote {demo.n_samples} samples x {demo.dims} DoF to {out}")


@main.command("preprocess")
@click.option("--in", "input_path", type=click.Path(exists=True),
              required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--config", type=click.Path(exists=True), default=None,
              envvar="PRIMO_CONFIG",
              help="JSON/TOML preprocessing config "
                   "(default from PRIMO_CONFIG)")
@click.option("--resample-dt", type=float, default=None)
@click.option("--hampel-window", type=int, default=None)
@click.option("--hampel-nsigma", type=float, default=None)
@click.option("--smooth-window", type=int, default=None)
@_handle_errors
def cmd_preprocess(input_path, out, config, resample_dt, hampel_window,
                   hampel_nsigma, smooth_window):
    """Clean a raw demo CSV into a fit-ready trajectory CSV."""
    cfg = demos.PreprocessConfig.from_file(config) if config \
        else demos.PreprocessConfig()
    overrides = {"resample_dt": resample_dt, "hampel_window": hampel_window,
                 "hampel_nsigma": hampel_nsigma,
                 "smooth_window": smooth_window}
    fields = {k: v for k, v in overrides.items() if v is not None}
    if fields:
        base = {"resample_dt": cfg.resample_dt,
                "hampel_window": cfg.hampel_window,
                "hampel_nsigma": cfg.hampel_nsigma,
                "smooth_window": cfg.smooth_window}
        base.update(fields)
        cfg = demos.PreprocessConfig(**base)
    raw = demos.RawDemo.from_csv(input_path)
    traj = demos.preprocess(raw, cfg)
    traj.to_csv(out)
    click.echo(f"wrote {traj.n_samples} samples at dt={traj.dt:g} to {out}")


@main.group("learn")
def cmd_learn():
    """Fit skill models from demonstration trajectories."""


@cmd_learn.command("dmp")
@click.option("--demo", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--n-basis", type=int, default=dmp.DEFAULT_N_BASIS,
              show_default=True)
@click.option("--alpha", type=float, default=dmp.DEFAULT_ALPHA,
              show_default=True)
@click.option("--alpha-k", type=float, default=dmp.DEFAULT_ALPHA_K,
              show_default=True)
@_handle_errors
def cmd_learn_dmp(demo, out, n_basis, alpha, alpha_k):
    """Fit the forcing-term weights of an absolute skill."""
    traj = Trajectory.from_csv(demo)
    model = dmp.fit_weights(traj, alpha=alpha, alpha_k=alpha_k,
                            n_basis=n_basis)
    rmse, ratio = dmp.fit_rmse(model, traj)
    model.save(out)
    click.echo(f"fit rmse {rmse:.3e} m ({100 * ratio:.3f}% of range), "
               f"model written to {out}")


@cmd_learn.command("oa")
@click.option("--perturbed", type=click.Path(exists=True), required=True,
              help="Trajectory CSV recorded with the obstacle present")
@click.option("--baseline", type=click.Path(exists=True), required=True,
              help="Trajectory CSV of the unperturbed task")
@click.option("--obstacle", required=True, help="Obstacle position x,y[,z]")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--series-out", type=click.Path(dir_okay=False), default=None,
              help="Also dump the extracted (theta, theta_dot) series")
@click.option("--theta-min", type=float, default=oa.EPS, show_default=True)
@click.option("--rate-frac", type=float, default=0.2, show_default=True,
              help="Drop turning rates below this fraction of the peak")
@click.option("--speed-floor", type=float, default=0.15, show_default=True,
              help="Drop samples below this fraction of the peak speed")
@click.option("--include-behind", is_flag=True,
              help="Keep samples where the obstacle lies behind the motion")
@_handle_errors
def cmd_learn_oa(perturbed, baseline, obstacle, out, series_out, theta_min,
                 rate_frac, speed_floor, include_behind):
    """Learn the steering style (gamma, beta_oa) from a demo pair."""
    demo_obs = Trajectory.from_csv(perturbed)
    demo_base = Trajectory.from_csv(baseline)
    point = oa.Obstacle(_parse_point(obstacle, "--obstacle"))
    series = oa.extract_turning_series(demo_obs, demo_base, point,
                                       speed_floor=speed_floor,
                                       ahead_only=not include_behind)
    rate_min = max(oa.EPS, rate_frac * float(np.abs(series[:, 1]).max()))
    params = oa.learn_params(series, theta_min=theta_min, rate_min=rate_min)
    r2 = oa.steering_fit_r2(series, params, theta_min=theta_min,
                            rate_min=rate_min)
    params.save(out)
    if series_out:
        np.savetxt(series_out, series, fmt="%.17g", delimiter=",",
                   header="theta,theta_dot", comments="")
    click.echo(f"gamma={params.gamma:.6g} beta_oa={params.beta_oa:.6g} "
               f"r2={r2:.4f}, params written to {out}")


@main.command("inspect")
@click.argument("path", type=click.Path(exists=True))
@_handle_errors
def cmd_inspect(path):
    """Print a summary of a model, params, scene or metrics JSON file."""
    with open(path) as fh:
        doc = json.load(fh)
    if "weights" in doc and "centers" in doc:
        model = dmp.DmpModel.from_json_dict(doc)
        span = np.abs(model.weights).max() if model.weights.size else 0.0
        click.echo(f"dmp model: dims={model.dims} n_basis={model.n_basis} "
                   f"tau={model.tau:g} alpha={model.alpha:g} "
                   f"max|w|={span:.4g}")
    elif "gamma" in doc:
        params = oa.AvoidanceParams.from_json_dict(doc)
        peak = 1.0 / params.beta_oa
        click.echo(f"avoidance params: gamma={params.gamma:g} "
                   f"beta_oa={params.beta_oa:g} peak at theta={peak:.4g} rad")
    elif "grasp" in doc:
        scene = simulator.Scene.from_json_dict(doc)
        click.echo(f"scene: dims={scene.dims} obstacles="
                   f"{len(scene.obstacles)} horizon={scene.horizon:g} s "
                   f"mode={scene.mode}")
    elif "success" in doc:
        click.echo("metrics: " + ", ".join(f"{k}={v}"
                                           for k, v in sorted(doc.items())))
    else:
        raise click.UsageError(f"unrecognised document in {path}")


def _build_library(scene, dmp_path, oa_path, rel_paths):
    model = dmp.DmpModel.load(dmp_path)
    params = oa.AvoidanceParams.load(oa_path) if oa_path else None
    relative = tuple(load_skill(p) for p in rel_paths)
    return SkillLibrary(absolute=(AbsoluteSkill(model, params),),
                        relative=relative)


@main.command("simulate")
@click.option("--scene", "scene_path", type=click.Path(exists=True),
              required=True)
@click.option("--dmp", "dmp_path", type=click.Path(exists=True),
              required=True, help="Absolute skill model JSON")
@click.option("--oa", "oa_path", type=click.Path(exists=True), default=None,
              help="Avoidance params JSON to couple with the skill")
@click.option("--rel", "rel_paths", type=click.Path(exists=True),
              multiple=True, help="Relative skill JSON (repeatable)")
@click.option("--out", type=click.Path(file_okay=False), required=True)
@_handle_errors
def cmd_simulate(scene_path, dmp_path, oa_path, rel_paths, out):
    """Roll out a scene and export trajectories plus metrics."""
    scene = simulator.Scene.load(scene_path)
    library = _build_library(scene, dmp_path, oa_path, rel_paths)
    log = simulator.run(scene, library)
    log.export(out)
    metrics = log.metrics
    click.echo(f"goal_error={metrics.goal_error:.3e} m "
               f"min_clearance={metrics.min_clearance} "
               f"max_grasp_deviation={metrics.max_grasp_deviation:.3e} m "
               f"success={metrics.success}")
    if not metrics.success:
        sys.exit(1)


@main.command("batch")
@click.option("--scene", "scene_path", type=click.Path(exists=True),
              required=True, help="Base scene; obstacles are randomized")
@click.option("--dmp", "dmp_path", type=click.Path(exists=True),
              required=True)
@click.option("--oa", "oa_path", type=click.Path(exists=True), default=None)
@click.option("--rel", "rel_paths", type=click.Path(exists=True),
              multiple=True)
@click.option("--runs", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--radius", type=float, default=0.05, show_default=True,
              help="Obstacle radius for the randomized placements")
@click.option("--out", type=click.Path(file_okay=False), required=True)
@_handle_errors
def cmd_batch(scene_path, dmp_path, oa_path, rel_paths, runs, seed, radius,
              out):
    """Run many randomized-obstacle variants and report the success rate."""
    base = simulator.Scene.load(scene_path)
    library = _build_library(base, dmp_path, oa_path, rel_paths)
    scenes = [randomized_scene(base, seed, run, radius)
              for run in range(runs)]
    results = simulator.batch_run(scenes, library)
    os.makedirs(out, exist_ok=True)
    entries = []
    successes = 0
    for result in results:
        if result.log is not None:
            entry = result.log.metrics.to_json_dict()
            successes += bool(result.log.metrics.success)
        else:
            entry = {"error": result.error, "success": False}
        entry["index"] = result.index
        entries.append(entry)
    summary = {"runs": runs, "seed": seed,
               "success_rate": successes / runs if runs else 0.0,
               "results": entries}
    with open(os.path.join(out, "batch.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(f"success rate {successes}/{runs}")


def randomized_scene(base: simulator.Scene, seed: int, run: int,
                     radius: float) -> simulator.Scene:
    """Base scene with one obstacle placed randomly near the straight path."""
    from dataclasses import replace

    rng = np.random.default_rng([seed, run])
    span = base.goal - base.start
    along = rng.uniform(0.3, 0.7)
    lateral = rng.uniform(-0.2, 0.2) * np.linalg.norm(span)
    perp = np.zeros(base.dims)
    if base.dims >= 2:
        perp[:2] = np.array([-span[1], span[0]])
        norm = np.linalg.norm(perp)
        if norm > 0:
            perp /= norm
    position = base.start + along * span + lateral * perp
    obstacle = oa.Obstacle(position, radius)
    return replace(base, obstacles=(obstacle,))


if __name__ == "__main__":
    main()
