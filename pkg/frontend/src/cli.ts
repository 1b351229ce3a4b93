#!/usr/bin/env node
/** Render figures from solver CSV logs.
 *
 * Usage:
 *   render_figures <out-dir>
 *   render_figures --kind <kind> --output <file.svg> <input.csv> [...]
 *
 * Directory mode discovers the known CSV log names and renders every
 * applicable figure next to them:
 *   illustrative*.csv        -> convergence.svg   (all matches as one figure)
 *   crane_trajectories.csv   -> trajectories.svg
 *   inner_study.csv          -> inner_study.svg
 *   bench_summary.csv        -> bench_summary.svg
 *
 * Explicit mode renders one figure of the given kind (convergence,
 * trajectories, inner_study, bench_summary) from the listed CSV paths.
 */

import { readdir } from "fs/promises";
import path from "path";

import { FigureKind, FigureSpec, render } from "./figures.js";

export async function renderFigures(dir: string): Promise<string[]> {
  const entries = await readdir(dir);
  const specs: FigureSpec[] = [];

  const illustrative = entries
    .filter((e) => /^illustrative.*\.csv$/.test(e))
    .sort()
    .map((e) => path.join(dir, e));
  if (illustrative.length > 0) {
    specs.push({
      kind: "convergence",
      inputs: illustrative,
      output: path.join(dir, "convergence.svg"),
    });
  }
  if (entries.includes("crane_trajectories.csv")) {
    specs.push({
      kind: "trajectories",
      inputs: [path.join(dir, "crane_trajectories.csv")],
      output: path.join(dir, "trajectories.svg"),
    });
  }
  if (entries.includes("inner_study.csv")) {
    specs.push({
      kind: "inner_study",
      inputs: [path.join(dir, "inner_study.csv")],
      output: path.join(dir, "inner_study.svg"),
    });
  }
  if (entries.includes("bench_summary.csv")) {
    specs.push({
      kind: "bench_summary",
      inputs: [path.join(dir, "bench_summary.csv")],
      output: path.join(dir, "bench_summary.svg"),
    });
  }

  const written: string[] = [];
  for (const spec of specs) {
    written.push(await render(spec));
  }
  return written;
}

const KINDS: FigureKind[] = ["convergence", "trajectories", "inner_study",
  "bench_summary"];

export function parseExplicit(argv: string[]): FigureSpec {
  let kind: string | undefined;
  let output: string | undefined;
  const inputs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--kind") kind = argv[++i];
    else if (argv[i] === "--output") output = argv[++i];
    else inputs.push(argv[i]);
  }
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    throw new Error(`--kind must be one of: ${KINDS.join(", ")}`);
  }
  if (!output) throw new Error("--output is required");
  if (inputs.length === 0) throw new Error("at least one input CSV is required");
  return { kind: kind as FigureKind, inputs, output };
}

const invokedDirectly = process.argv[1] !== undefined &&
  import.meta.url.endsWith(path.basename(process.argv[1]));

if (invokedDirectly) {
  const argv = process.argv.slice(2);
  if (argv.length === 0) {
    console.error("usage: render_figures <out-dir>\n" +
      "       render_figures --kind <kind> --output <file.svg> <input.csv> [...]");
    process.exit(2);
  }
  const job = (async () => argv.includes("--kind")
    ? [await render(parseExplicit(argv))]
    : await renderFigures(argv[0]))();
  job
    .then((files) => {
      if (files.length === 0) {
        console.log(`no known CSV logs found in ${argv[0]}`);
      } else {
        for (const f of files) console.log(`wrote ${f}`);
      }
    })
    .catch((err) => {
      console.error(String(err));
      process.exit(1);
    });
}
