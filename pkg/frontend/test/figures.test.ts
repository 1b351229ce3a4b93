import { mkdtemp, readFile, rm, writeFile, copyFile } from "fs/promises";
import { tmpdir } from "os";
import path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { render, FigureSpec } from "../src/figures.js";
import { renderFigures } from "../src/cli.js";
import { parseCsv, columnIndices } from "../src/csv.js";

const FIXTURES = path.join(__dirname, "fixtures");

let workDir: string;

beforeAll(async () => {
  workDir = await mkdtemp(path.join(tmpdir(), "figures-"));
});

afterAll(async () => {
  await rm(workDir, { recursive: true, force: true });
});

function countTags(svg: string, tag: string): number {
  return (svg.match(new RegExp(`<${tag}[ >]`, "g")) ?? []).length;
}

describe("convergence figure", () => {
  it("renders the two-parameter comparison", async () => {
    const out = path.join(workDir, "convergence.svg");
    await render({
      kind: "convergence",
      inputs: [
        path.join(FIXTURES, "illustrative_pos.csv"),
        path.join(FIXTURES, "illustrative_neg.csv"),
      ],
      output: out,
      labels: ["fully determined", "not fully determined"],
    });
    const svg = await readFile(out, "utf8");
    expect(svg).toContain("<svg");
    expect(countTags(svg, "polyline")).toBe(2);
    expect(svg).toContain("fully determined");
  });

  it("is deterministic over identical inputs", async () => {
    const spec: FigureSpec = {
      kind: "convergence",
      inputs: [path.join(FIXTURES, "illustrative_pos.csv")],
      output: path.join(workDir, "deterministic.svg"),
    };
    await render(spec);
    const first = await readFile(spec.output, "utf8");
    await render(spec);
    const second = await readFile(spec.output, "utf8");
    expect(second).toBe(first);
  });

  it("fails naming a missing column", async () => {
    const bad = path.join(workDir, "bad.csv");
    await writeFile(bad, "k,w1,w2\n0,1,2\n");
    await expect(render({
      kind: "convergence",
      inputs: [bad],
      output: path.join(workDir, "bad.svg"),
    })).rejects.toThrow(/column 'error' missing/);
  });

  it("renders empty axes for a header-only file", async () => {
    const empty = path.join(workDir, "empty.csv");
    await writeFile(empty, "k,w1,w2,error,delta,rho,accepted\n");
    const out = path.join(workDir, "empty.svg");
    await render({ kind: "convergence", inputs: [empty], output: out });
    const svg = await readFile(out, "utf8");
    expect(svg).toContain("<svg");
    expect(countTags(svg, "polyline")).toBe(0);
  });
});

describe("trajectory figure", () => {
  it("draws one path per iterate plus obstacle and endpoints", async () => {
    const input = path.join(FIXTURES, "crane_trajectories.csv");
    const out = path.join(workDir, "trajectories.svg");
    await render({ kind: "trajectories", inputs: [input], output: out });
    const svg = await readFile(out, "utf8");
    const table = parseCsv(await readFile(input, "utf8"));
    const idx = columnIndices(table, ["k"], input);
    const iterates = new Set(table.rows.map((r) => r[idx.k])).size;
    expect(countTags(svg, "polyline")).toBe(iterates);
    expect(countTags(svg, "polygon")).toBe(1); // obstacle
    expect(svg).toContain(">A</text>");
    expect(svg).toContain(">B</text>");
  });
});

describe("inner study figure", () => {
  it("stacks infeasibility and ratio panels per radius", async () => {
    const input = path.join(FIXTURES, "inner_study.csv");
    const out = path.join(workDir, "inner_study.svg");
    await render({ kind: "inner_study", inputs: [input], output: out });
    const svg = await readFile(out, "utf8");
    const table = parseCsv(await readFile(input, "utf8"));
    const idx = columnIndices(table, ["radius"], input);
    const radii = new Set(table.rows.map((r) => r[idx.radius])).size;
    // h panel: one curve per radius; ratio panel: per radius + threshold line
    expect(countTags(svg, "polyline")).toBe(2 * radii + 1);
    expect(svg).toContain("acceptance bound");
  });
});

describe("bench summary figure", () => {
  it("plots iterations and evaluations per instance", async () => {
    const input = path.join(FIXTURES, "bench_summary.csv");
    const out = path.join(workDir, "bench.svg");
    await render({ kind: "bench_summary", inputs: [input], output: out });
    const svg = await readFile(out, "utf8");
    expect(countTags(svg, "polyline")).toBe(2);
    expect(svg).toContain("Constraint evaluations");
  });
});

describe("directory discovery", () => {
  it("renders every applicable figure once", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "discover-"));
    for (const name of ["illustrative_pos.csv", "illustrative_neg.csv",
      "crane_trajectories.csv", "inner_study.csv", "bench_summary.csv"]) {
      await copyFile(path.join(FIXTURES, name), path.join(dir, name));
    }
    const written = await renderFigures(dir);
    expect(written.map((f) => path.basename(f)).sort()).toEqual([
      "bench_summary.svg", "convergence.svg", "inner_study.svg",
      "trajectories.svg",
    ]);
    await rm(dir, { recursive: true, force: true });
  });

  it("returns nothing for an unrelated directory", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "unrelated-"));
    const written = await renderFigures(dir);
    expect(written).toEqual([]);
    await rm(dir, { recursive: true, force: true });
  });
});
