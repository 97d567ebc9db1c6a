#!/usr/bin/env node
/**
 * traceplot — render primo simulation traces as SVG figures.
 *
 * Usage:
 *   traceplot dmp-fan         --in t1.csv t2.csv ... --out fan.svg
 *   traceplot steering-curve  --in series.csv --params oa.json --out fig.svg
 *   traceplot scene-path      --in demo.csv [infer.csv [avoid.csv]] \
 *                             --scene scene.json --out fig.svg
 *   traceplot grasp-deviation --in grasp_deviation.csv --out fig.svg
 *
 * Exit codes: 0 ok, 1 schema/render failure, 2 usage error.
 */

import { writeFileSync } from "fs";

import { SchemaError } from "./csv";
import { PlotKind, render } from "./plots";

const KINDS: PlotKind[] = [
  "dmp-fan",
  "steering-curve",
  "scene-path",
  "grasp-deviation",
];

interface Args {
  kind: PlotKind;
  inputs: string[];
  out: string;
  params?: string;
  scene?: string;
}

function usage(message?: string): never {
  if (message) console.error(`usage error: ${message}`);
  console.error(
    `usage: traceplot <${KINDS.join("|")}> --in FILE... --out FILE.svg ` +
      "[--params FILE.json] [--scene FILE.json]",
  );
  process.exit(2);
}

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) usage();
  const kind = argv[0] as PlotKind;
  if (!KINDS.includes(kind)) usage(`unknown plot kind "${argv[0]}"`);
  const inputs: string[] = [];
  let out: string | undefined;
  let params: string | undefined;
  let scene: string | undefined;
  let i = 1;
  while (i < argv.length) {
    const flag = argv[i];
    if (flag === "--in") {
      i++;
      while (i < argv.length && !argv[i].startsWith("--")) {
        inputs.push(argv[i]);
        i++;
      }
    } else if (flag === "--out") {
      out = argv[++i];
      i++;
    } else if (flag === "--params") {
      params = argv[++i];
      i++;
    } else if (flag === "--scene") {
      scene = argv[++i];
      i++;
    } else {
      usage(`unknown flag "${flag}"`);
    }
  }
  if (inputs.length === 0) usage("--in is required");
  if (!out) usage("--out is required");
  return { kind, inputs, out, params, scene };
}

export function main(argv: string[]): void {
  const args = parseArgs(argv);
  try {
    const result = render(args.kind, args.inputs, {
      params: args.params,
      scene: args.scene,
    });
    writeFileSync(args.out, result.svg);
    const meta = Object.entries(result.meta)
      .map(([k, v]) => `${k}=${typeof v === "number" ? v.toPrecision(6) : v}`)
      .join(" ");
    console.log(`wrote ${args.out} (${meta})`);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      process.exit(1);
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`input not found: ${err.message}`);
      process.exit(1);
    }
    throw err;
  }
}

if (require.main === module) {
  main(process.argv.slice(2));
}
