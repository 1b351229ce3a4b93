/** Figure construction from the solver's CSV logs.
 *
 * Kinds:
 *   convergence   — log-scale error vs outer iteration, one curve per file
 *   trajectories  — payload paths per iterate with obstacle and endpoints
 *   inner_study   — infeasibility and projection ratio per inner iteration,
 *                   one curve per trust-region radius (two stacked panels)
 *   bench_summary — outer iterations and constraint evaluations per instance
 */

import { readFile, writeFile, mkdir } from "fs/promises";
import path from "path";

import { columnIndices, num, parseCsv, Table } from "./csv.js";
import { PointMarker, RectOverlay, renderChart, Series, stackCharts } from "./svg.js";

export type FigureKind = "convergence" | "trajectories" | "inner_study" | "bench_summary";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  /** Per-input legend labels (convergence); defaults to file basenames. */
  labels?: string[];
  /** Obstacle corners for trajectory plots. */
  obstacle?: [number, number][];
  startPoint?: [number, number];
  endPoint?: [number, number];
}

export const DEFAULT_OBSTACLE: [number, number][] = [
  [0.2, -0.55], [0.3, -0.55], [0.3, -0.35], [0.2, -0.35],
];
export const DEFAULT_START: [number, number] = [0.0, -0.6];
export const DEFAULT_END: [number, number] = [0.5, -0.6];

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f"];

async function loadTable(file: string): Promise<Table> {
  const text = await readFile(file, "utf8");
  return parseCsv(text);
}

function groupBy(table: Table, keyIdx: number): Map<string, string[][]> {
  const groups = new Map<string, string[][]>();
  for (const row of table.rows) {
    const key = row[keyIdx];
    const bucket = groups.get(key);
    if (bucket) bucket.push(row);
    else groups.set(key, [row]);
  }
  return groups;
}

async function convergenceSvg(spec: FigureSpec): Promise<string> {
  const series: Series[] = [];
  for (let i = 0; i < spec.inputs.length; i++) {
    const file = spec.inputs[i];
    const table = await loadTable(file);
    const idx = columnIndices(table, ["k", "error"], file);
    const x: number[] = [];
    const y: number[] = [];
    for (const row of table.rows) {
      const k = num(row[idx.k]);
      const err = num(row[idx.error]);
      if (k === null || err === null) continue;
      x.push(k);
      y.push(err);
    }
    series.push({
      x, y,
      color: PALETTE[i % PALETTE.length],
      label: spec.labels?.[i] ?? path.basename(file, ".csv"),
      markers: true,
    });
  }
  return renderChart({
    title: "Convergence to the known optimum",
    xLabel: "outer iteration",
    yLabel: "error",
    logY: true,
    series,
  });
}

async function trajectoriesSvg(spec: FigureSpec): Promise<string> {
  const file = spec.inputs[0];
  const table = await loadTable(file);
  const idx = columnIndices(table, ["k", "stage", "p_x", "p_y"], file);
  const groups = groupBy(table, idx.k);
  const series: Series[] = [];
  const keys = [...groups.keys()];
  keys.forEach((key, i) => {
    const rows = groups.get(key)!;
    rows.sort((a, b) => Number(a[idx.stage]) - Number(b[idx.stage]));
    series.push({
      x: rows.map((r) => num(r[idx.p_x]) ?? 0),
      y: rows.map((r) => num(r[idx.p_y]) ?? 0),
      color: PALETTE[i % PALETTE.length],
      label: `iterate ${key}`,
      width: i === keys.length - 1 ? 2.5 : 1.2,
    });
  });
  const obstacle = spec.obstacle ?? DEFAULT_OBSTACLE;
  const rects: RectOverlay[] = [{
    xs: obstacle.map((v) => v[0]),
    ys: obstacle.map((v) => v[1]),
    fill: "#cccccc",
    stroke: "black",
  }];
  const start = spec.startPoint ?? DEFAULT_START;
  const end = spec.endPoint ?? DEFAULT_END;
  const points: PointMarker[] = [
    { x: start[0], y: start[1], color: "#2ca02c", label: "A" },
    { x: end[0], y: end[1], color: "#d62728", label: "B" },
  ];
  return renderChart({
    title: "Payload trajectories per iterate",
    xLabel: "x [m]",
    yLabel: "y [m]",
    series,
    rects,
    points,
    equalAspect: true,
    height: 480,
  });
}

async function innerStudySvg(spec: FigureSpec): Promise<string> {
  const file = spec.inputs[0];
  const table = await loadTable(file);
  const idx = columnIndices(table, ["radius", "inner_l", "h", "ratio"], file);
  const groups = groupBy(table, idx.radius);
  const hSeries: Series[] = [];
  const ratioSeries: Series[] = [];
  let i = 0;
  for (const [radius, rows] of groups) {
    rows.sort((a, b) => Number(a[idx.inner_l]) - Number(b[idx.inner_l]));
    const x = rows.map((r) => num(r[idx.inner_l]) ?? 0);
    const color = PALETTE[i % PALETTE.length];
    hSeries.push({
      x, y: rows.map((r) => num(r[idx.h]) ?? 0),
      color, label: `radius ${radius}`, markers: true,
    });
    ratioSeries.push({
      x, y: rows.map((r) => num(r[idx.ratio]) ?? 0),
      color, label: `radius ${radius}`, markers: true,
    });
    i++;
  }
  const top = renderChart({
    title: "Feasibility iterations: infeasibility",
    xLabel: "inner iteration",
    yLabel: "h",
    logY: true,
    series: hSeries,
    height: 360,
  });
  const bottom = renderChart({
    title: "Feasibility iterations: projection ratio",
    xLabel: "inner iteration",
    yLabel: "ratio",
    series: [
      ...ratioSeries,
      ratioThreshold(ratioSeries),
    ],
    height: 360,
  });
  return stackCharts([top, bottom]);
}

function ratioThreshold(series: Series[]): Series {
  let xMax = 1;
  for (const s of series) for (const v of s.x) xMax = Math.max(xMax, v);
  return {
    x: [0, xMax],
    y: [0.5, 0.5],
    color: "#000000",
    dash: "5 4",
    label: "acceptance bound",
  };
}

async function benchSummarySvg(spec: FigureSpec): Promise<string> {
  const file = spec.inputs[0];
  const table = await loadTable(file);
  const idx = columnIndices(
    table, ["instance", "outer_iterations", "constraint_evaluations"], file);
  const rows = [...table.rows].sort(
    (a, b) => Number(a[idx.instance]) - Number(b[idx.instance]));
  const x = rows.map((r) => num(r[idx.instance]) ?? 0);
  const top = renderChart({
    title: "Outer iterations per instance",
    xLabel: "instance",
    yLabel: "outer iterations",
    series: [{
      x, y: rows.map((r) => num(r[idx.outer_iterations]) ?? 0),
      color: PALETTE[0], markers: true,
    }],
    height: 320,
  });
  const bottom = renderChart({
    title: "Constraint evaluations per instance",
    xLabel: "instance",
    yLabel: "evaluations",
    series: [{
      x, y: rows.map((r) => num(r[idx.constraint_evaluations]) ?? 0),
      color: PALETTE[1], markers: true,
    }],
    height: 320,
  });
  return stackCharts([top, bottom]);
}

export async function render(spec: FigureSpec): Promise<string> {
  if (spec.inputs.length === 0) {
    throw new Error(`figure '${spec.kind}' needs at least one input CSV`);
  }
  let svg: string;
  switch (spec.kind) {
    case "convergence":
      svg = await convergenceSvg(spec);
      break;
    case "trajectories":
      svg = await trajectoriesSvg(spec);
      break;
    case "inner_study":
      svg = await innerStudySvg(spec);
      break;
    case "bench_summary":
      svg = await benchSummarySvg(spec);
      break;
    default:
      throw new Error(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
  await mkdir(path.dirname(spec.output), { recursive: true });
  await writeFile(spec.output, svg, "utf8");
  return spec.output;
}
