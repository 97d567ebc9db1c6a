/** The four plot kinds rendered from primo's CSV/JSON exports. */

import { basename } from "path";

import {
  readDeviationSeries,
  readParams,
  readScene,
  readSteeringSeries,
  readTrajectory,
  SchemaError,
} from "./csv";
import { Chart, extent, pad, xScale, yScale } from "./svg";

export interface RenderResult {
  svg: string;
  /** per-kind diagnostics, also printed by the CLI */
  meta: Record<string, number | string>;
}

const FAN_COLORS = [
  "#1565c0",
  "#c62828",
  "#2e7d32",
  "#6a1b9a",
  "#ef6c00",
  "#00838f",
  "#ad1457",
  "#4e342e",
];

function mergedExtent(values: number[][]): { min: number; max: number } {
  return extent(values.flat());
}

export function dmpFan(inputs: string[]): RenderResult {
  if (inputs.length < 1) {
    throw new SchemaError("dmp-fan needs at least one trajectory CSV");
  }
  const trajectories = inputs.map(readTrajectory);
  const planar = trajectories[0].dims >= 2;
  for (const traj of trajectories) {
    if ((traj.dims >= 2) !== planar) {
      throw new SchemaError("dmp-fan inputs must agree on dimensionality");
    }
  }
  const xs = trajectories.map((tr) =>
    planar ? tr.x.map((p) => p[0]) : tr.t,
  );
  const ys = trajectories.map((tr) =>
    planar ? tr.x.map((p) => p[1]) : tr.x.map((p) => p[0]),
  );
  const sx = xScale(pad(mergedExtent(xs)));
  const sy = yScale(pad(mergedExtent(ys)));
  const chart = new Chart(
    sx,
    sy,
    "Goal generalization fan",
    planar ? "x (m)" : "t (s)",
    planar ? "y (m)" : "x (m)",
  );
  trajectories.forEach((_, i) => {
    chart.polyline(xs[i], ys[i], FAN_COLORS[i % FAN_COLORS.length], {
      cssClass: "series",
    });
  });
  chart.legend(
    inputs.map((path, i) => ({
      label: basename(path),
      color: FAN_COLORS[i % FAN_COLORS.length],
    })),
  );
  return { svg: chart.render(), meta: { series: trajectories.length } };
}

export function steeringCurve(
  inputs: string[],
  paramsPath: string | undefined,
): RenderResult {
  if (inputs.length !== 1) {
    throw new SchemaError("steering-curve takes exactly one series CSV");
  }
  if (!paramsPath) {
    throw new SchemaError("steering-curve needs --params with gamma/beta_oa");
  }
  const series = readSteeringSeries(inputs[0]);
  const params = readParams(paramsPath);

  const n = 400;
  const curveTheta: number[] = [];
  const curveRate: number[] = [];
  for (let i = 1; i <= n; i++) {
    const theta = (Math.PI * i) / n;
    curveTheta.push(theta);
    curveRate.push(
      params.gamma * theta * Math.exp(-params.beta_oa * Math.abs(theta)),
    );
  }
  const peakIndex = curveRate.indexOf(Math.max(...curveRate));

  const rates = series.thetaDot.map(Math.abs);
  const analyticAt = series.theta.map(
    (t) => params.gamma * t * Math.exp(-params.beta_oa * Math.abs(t)),
  );
  let devSq = 0;
  let refSq = 0;
  for (let i = 0; i < rates.length; i++) {
    devSq += (rates[i] - analyticAt[i]) ** 2;
    refSq += analyticAt[i] ** 2;
  }
  const rms = refSq > 0 ? Math.sqrt(devSq / refSq) : Infinity;

  const sx = xScale(pad({ min: 0, max: Math.PI }));
  const sy = yScale(pad({ min: 0, max: Math.max(...curveRate, ...rates) }));
  const chart = new Chart(
    sx,
    sy,
    "Steering turning rate vs angle",
    "theta (rad)",
    "theta_dot (rad/s)",
  );
  chart.polyline(curveTheta, curveRate, "#1565c0", {
    cssClass: "analytic",
    width: 2,
  });
  chart.scatter(series.theta, rates, "#c62828");
  chart.legend([
    {
      label: `analytic (gamma=${params.gamma.toPrecision(4)}, beta=${params.beta_oa.toPrecision(4)})`,
      color: "#1565c0",
    },
    { label: `extracted samples (${series.theta.length})`, color: "#c62828" },
  ]);
  return {
    svg: chart.render(),
    meta: {
      analyticPeakTheta: curveTheta[peakIndex],
      rmsDeviation: rms,
      samples: series.theta.length,
    },
  };
}

const SCENE_ROLES = [
  { label: "demonstration", color: "#c62828" },
  { label: "inference", color: "#1565c0" },
  { label: "avoidance", color: "#212121" },
];

export function scenePath(
  inputs: string[],
  scenePathname: string | undefined,
): RenderResult {
  if (inputs.length < 1 || inputs.length > 3) {
    throw new SchemaError(
      "scene-path takes 1 to 3 trajectory CSVs (demonstration, inference, avoidance)",
    );
  }
  if (!scenePathname) {
    throw new SchemaError("scene-path needs --scene with the scene JSON");
  }
  const scene = readScene(scenePathname);
  const trajectories = inputs.map(readTrajectory);
  for (const traj of trajectories) {
    if (traj.dims < 2) {
      throw new SchemaError("scene-path needs 2D trajectories");
    }
  }
  const xsAll = trajectories.map((tr) => tr.x.map((p) => p[0]));
  const ysAll = trajectories.map((tr) => tr.x.map((p) => p[1]));
  const obstacleXs = scene.obstacles.flatMap((ob) => [
    ob.position[0] - ob.radius,
    ob.position[0] + ob.radius,
  ]);
  const obstacleYs = scene.obstacles.flatMap((ob) => [
    ob.position[1] - ob.radius,
    ob.position[1] + ob.radius,
  ]);
  const sx = xScale(
    pad(extent([...xsAll.flat(), ...obstacleXs, scene.start[0], scene.goal[0]])),
  );
  const sy = yScale(
    pad(extent([...ysAll.flat(), ...obstacleYs, scene.start[1], scene.goal[1]])),
  );
  const chart = new Chart(sx, sy, "Pick-and-place paths", "x (m)", "y (m)");
  for (const ob of scene.obstacles) {
    chart.circle(ob.position[0], ob.position[1], ob.radius, "#757575");
  }
  trajectories.forEach((_, i) => {
    chart.polyline(xsAll[i], ysAll[i], SCENE_ROLES[i].color, {
      cssClass: "series",
      width: 2,
    });
  });
  chart.marker(scene.start[0], scene.start[1], "#2e7d32", "start");
  chart.marker(scene.goal[0], scene.goal[1], "#d84315", "goal");
  chart.legend(
    trajectories.map((_, i) => ({
      label: `${SCENE_ROLES[i].label} (${basename(inputs[i])})`,
      color: SCENE_ROLES[i].color,
    })),
  );
  return {
    svg: chart.render(),
    meta: { series: trajectories.length, obstacles: scene.obstacles.length },
  };
}

export function graspDeviation(inputs: string[]): RenderResult {
  if (inputs.length !== 1) {
    throw new SchemaError("grasp-deviation takes exactly one deviation CSV");
  }
  const series = readDeviationSeries(inputs[0]);
  const sx = xScale(pad(extent(series.t)));
  const sy = yScale(
    pad({ min: 0, max: Math.max(...series.left, ...series.right, 1e-6) }),
  );
  const chart = new Chart(
    sx,
    sy,
    "Grasp distance deviation",
    "t (s)",
    "|D_r - D_d| (m)",
  );
  chart.polyline(series.t, series.left, "#1565c0", {
    cssClass: "series",
    width: 2,
  });
  chart.polyline(series.t, series.right, "#c62828", {
    cssClass: "series",
    width: 2,
    dash: "6 4",
  });
  chart.legend([
    { label: "left arm", color: "#1565c0" },
    { label: "right arm", color: "#c62828", dash: "6 4" },
  ]);
  const peak = Math.max(...series.left, ...series.right);
  return { svg: chart.render(), meta: { peakDeviation: peak } };
}

export type PlotKind =
  | "dmp-fan"
  | "steering-curve"
  | "scene-path"
  | "grasp-deviation";

export function render(
  kind: PlotKind,
  inputs: string[],
  options: { params?: string; scene?: string } = {},
): RenderResult {
  switch (kind) {
    case "dmp-fan":
      return dmpFan(inputs);
    case "steering-curve":
      return steeringCurve(inputs, options.params);
    case "scene-path":
      return scenePath(inputs, options.scene);
    case "grasp-deviation":
      return graspDeviation(inputs);
    default:
      throw new SchemaError(`unknown plot kind ${JSON.stringify(kind)}`);
  }
}
