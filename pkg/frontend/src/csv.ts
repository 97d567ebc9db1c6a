/**
 * Parsers for the primo CSV/JSON export contracts.
 *
 * Trajectories:      t,dof0_x,dof0_v,dof0_a,...   (one row per sample)
 * Steering series:   theta,theta_dot
 * Grasp deviation:   t,dev_left,dev_right
 */

import { readFileSync } from "fs";

export class SchemaError extends Error {}

export interface Trajectory {
  t: number[];
  /** positions per sample, one entry per DoF */
  x: number[][];
  dims: number;
}

export interface SteeringSeries {
  theta: number[];
  thetaDot: number[];
}

export interface DeviationSeries {
  t: number[];
  left: number[];
  right: number[];
}

export interface SceneDoc {
  dims: number;
  start: number[];
  goal: number[];
  obstacles: { position: number[]; radius: number }[];
}

export interface ParamsDoc {
  gamma: number;
  beta_oa: number;
}

function parseTable(path: string): { header: string[]; rows: number[][] } {
  const text = readFileSync(path, "utf8").trim();
  if (text.length === 0) {
    throw new SchemaError(`${path}: empty file, expected a CSV header`);
  }
  const lines = text.split(/\r?\n/);
  const header = lines[0].split(",").map((s) => s.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i].trim() === "") continue;
    const cells = lines[i].split(",").map(Number);
    if (cells.length !== header.length || cells.some(Number.isNaN)) {
      throw new SchemaError(
        `${path}: row ${i + 1} does not match the ${header.length}-column header`,
      );
    }
    rows.push(cells);
  }
  return { header, rows };
}

function checkHeader(path: string, got: string[], expected: string[]): void {
  for (let i = 0; i < Math.max(got.length, expected.length); i++) {
    if (got[i] !== expected[i]) {
      throw new SchemaError(
        `${path}: unexpected column ${JSON.stringify(got[i] ?? "<missing>")} ` +
          `at position ${i + 1}, expected ${JSON.stringify(expected[i] ?? "<none>")}`,
      );
    }
  }
}

export function readTrajectory(path: string): Trajectory {
  const { header, rows } = parseTable(path);
  const dims = Math.floor((header.length - 1) / 3);
  if (dims < 1 || header.length !== 1 + 3 * dims) {
    throw new SchemaError(
      `${path}: trajectory header needs t plus x/v/a triplets, got ${header.length} columns`,
    );
  }
  const expected = ["t"];
  for (let d = 0; d < dims; d++) {
    expected.push(`dof${d}_x`, `dof${d}_v`, `dof${d}_a`);
  }
  checkHeader(path, header, expected);
  if (rows.length < 2) {
    throw new SchemaError(`${path}: a trajectory needs at least 2 samples`);
  }
  return {
    t: rows.map((r) => r[0]),
    x: rows.map((r) => {
      const point: number[] = [];
      for (let d = 0; d < dims; d++) point.push(r[1 + 3 * d]);
      return point;
    }),
    dims,
  };
}

export function readSteeringSeries(path: string): SteeringSeries {
  const { header, rows } = parseTable(path);
  checkHeader(path, header, ["theta", "theta_dot"]);
  if (rows.length < 1) {
    throw new SchemaError(`${path}: steering series has no samples`);
  }
  return {
    theta: rows.map((r) => r[0]),
    thetaDot: rows.map((r) => r[1]),
  };
}

export function readDeviationSeries(path: string): DeviationSeries {
  const { header, rows } = parseTable(path);
  checkHeader(path, header, ["t", "dev_left", "dev_right"]);
  if (rows.length < 2) {
    throw new SchemaError(`${path}: deviation series needs at least 2 samples`);
  }
  return {
    t: rows.map((r) => r[0]),
    left: rows.map((r) => r[1]),
    right: rows.map((r) => r[2]),
  };
}

export function readScene(path: string): SceneDoc {
  const doc = JSON.parse(readFileSync(path, "utf8"));
  for (const key of ["dims", "start", "goal"]) {
    if (!(key in doc)) {
      throw new SchemaError(`${path}: scene document is missing "${key}"`);
    }
  }
  return {
    dims: doc.dims,
    start: doc.start,
    goal: doc.goal,
    obstacles: (doc.obstacles ?? []).map(
      (ob: { position: number[]; radius?: number }) => ({
        position: ob.position,
        radius: ob.radius ?? 0,
      }),
    ),
  };
}

export function readParams(path: string): ParamsDoc {
  const doc = JSON.parse(readFileSync(path, "utf8"));
  if (typeof doc.gamma !== "number" || typeof doc.beta_oa !== "number") {
    throw new SchemaError(
      `${path}: avoidance params need numeric "gamma" and "beta_oa"`,
    );
  }
  return { gamma: doc.gamma, beta_oa: doc.beta_oa };
}
