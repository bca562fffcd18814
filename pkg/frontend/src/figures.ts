/**
 * The four figure kinds rendered from the solver's CSV outputs.
 *
 * surface  value_surface.csv   (t, x) heatmap of V with a colorbar
 * slice    slice_t0.csv        V(t=0, x) curve
 * regions  regions.csv         per-player intervention masks over (t, x)
 * path     path.csv            optimal value and state path with impulse markers
 *
 * Rendering is read-only over the inputs and fully deterministic; rerunning
 * with identical inputs overwrites the output with identical bytes.
 */

import { writeFileSync } from "node:fs";

import { SchemaError, numericColumn, optionalNumericColumn, readTable, stringColumn, uniqueSorted } from "./csv.js";
import { SvgDoc, colorScale, drawAxes, drawColorbar, extent } from "./svg.js";

export type FigureKind = "surface" | "slice" | "regions" | "path";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

const T_COL = "t (years)";
const X_COL = "x (rate)";
const V_COL = "V (payoff)";

function singleInput(spec: FigureSpec): string {
  if (spec.inputs.length !== 1) {
    throw new SchemaError(`figure kind '${spec.kind}' takes exactly one input file, got ${spec.inputs.length}`);
  }
  return spec.inputs[0];
}

function renderSurface(spec: FigureSpec): string {
  const path = singleInput(spec);
  const table = readTable(path);
  const ts = numericColumn(table, path, T_COL);
  const xs = numericColumn(table, path, X_COL);
  const vs = numericColumn(table, path, V_COL);

  const tAxis = uniqueSorted(ts);
  const xAxis = uniqueSorted(xs);
  const doc = new SvgDoc(640, 480);
  const panel = { x: 70, y: 40, width: 480, height: 380 };
  const [vmin, vmax] = extent(vs);
  const color = colorScale(vmin, vmax);
  const { sx, sy } = drawAxes(
    doc,
    panel,
    extent(tAxis),
    extent(xAxis),
    spec.xLabel ?? "t (years)",
    spec.yLabel ?? "x (rate)",
    spec.title ?? "value surface",
  );
  const cellW = panel.width / tAxis.length;
  const cellH = panel.height / xAxis.length;
  const tIndex = new Map(tAxis.map((t, i) => [t, i]));
  const xIndex = new Map(xAxis.map((x, i) => [x, i]));
  for (let row = 0; row < vs.length; row++) {
    const ti = tIndex.get(ts[row])!;
    const xi = xIndex.get(xs[row])!;
    const px = sx(tAxis[0]) + ti * cellW;
    const py = sy(xAxis[0]) - (xi + 1) * cellH;
    doc.rect(px, py, cellW + 0.5, cellH + 0.5, color(vs[row]), "cell");
  }
  drawColorbar(doc, panel.x + panel.width + 24, panel.y, panel.height, vmin, vmax, "V");
  return doc.toString();
}

function renderSlice(spec: FigureSpec): string {
  const path = singleInput(spec);
  const table = readTable(path);
  const xs = numericColumn(table, path, X_COL);
  const vs = numericColumn(table, path, V_COL);
  const doc = new SvgDoc(560, 400);
  const panel = { x: 70, y: 40, width: 440, height: 300 };
  const { sx, sy } = drawAxes(
    doc,
    panel,
    extent(xs),
    extent(vs),
    spec.xLabel ?? "x (rate)",
    spec.yLabel ?? "V (payoff)",
    spec.title ?? "value at t = 0",
  );
  const points = xs.map((x, i) => [sx(x), sy(vs[i])] as [number, number]);
  doc.polyline(points, "#1f5fa8", 2);
  return doc.toString();
}

function renderRegions(spec: FigureSpec): string {
  const path = singleInput(spec);
  const table = readTable(path);
  const ts = numericColumn(table, path, T_COL);
  const xs = numericColumn(table, path, X_COL);
  const branches = stringColumn(table, path, "branch");
  for (let i = 0; i < branches.length; i++) {
    if (!["C", "MAX", "MIN"].includes(branches[i])) {
      throw new SchemaError(`${path}: column 'branch' has unknown label '${branches[i]}' at data row ${i}`);
    }
  }

  const tAxis = uniqueSorted(ts);
  const xAxis = uniqueSorted(xs);
  const doc = new SvgDoc(900, 420);
  const panels = [
    { x: 70, y: 50, width: 340, height: 300 },
    { x: 500, y: 50, width: 340, height: 300 },
  ];
  const masks: Array<{ label: string; branch: string; cls: string; fill: string }> = [
    { label: "maximizer impulse region", branch: "MAX", cls: "cell-max", fill: "#c23b3b" },
    { label: "minimizer impulse region", branch: "MIN", cls: "cell-min", fill: "#3b6fc2" },
  ];
  for (let m = 0; m < 2; m++) {
    const panel = panels[m];
    const { sx, sy } = drawAxes(
      doc,
      panel,
      extent(tAxis),
      extent(xAxis),
      spec.xLabel ?? "t (years)",
      spec.yLabel ?? "x (rate)",
      masks[m].label,
    );
    const cellW = panel.width / tAxis.length;
    const cellH = panel.height / xAxis.length;
    const tIndex = new Map(tAxis.map((t, i) => [t, i]));
    const xIndex = new Map(xAxis.map((x, i) => [x, i]));
    for (let row = 0; row < branches.length; row++) {
      if (branches[row] !== masks[m].branch) continue;
      const px = sx(tAxis[0]) + tIndex.get(ts[row])! * cellW;
      const py = sy(xAxis[0]) - (xIndex.get(xs[row])! + 1) * cellH;
      doc.rect(px, py, cellW + 0.5, cellH + 0.5, masks[m].fill, masks[m].cls);
    }
  }
  return doc.toString();
}

function renderPath(spec: FigureSpec): string {
  const path = singleInput(spec);
  const table = readTable(path);
  const ts = numericColumn(table, path, T_COL);
  const states = numericColumn(table, path, "x_state (rate)");
  const values = numericColumn(table, path, "value (payoff)");
  const actions = stringColumn(table, path, "action");
  optionalNumericColumn(table, path, "impulse (rate)"); // schema check; markers use states

  const doc = new SvgDoc(900, 420);
  const left = { x: 70, y: 50, width: 340, height: 300 };
  const right = { x: 500, y: 50, width: 340, height: 300 };

  const axesLeft = drawAxes(
    doc,
    left,
    extent(ts),
    extent(values),
    spec.xLabel ?? "t (years)",
    "V (payoff)",
    "value along the optimal path",
  );
  doc.polyline(
    ts.map((t, i) => [axesLeft.sx(t), axesLeft.sy(values[i])] as [number, number]),
    "#1f5fa8",
    2,
  );

  const axesRight = drawAxes(
    doc,
    right,
    extent(ts),
    extent(states),
    spec.xLabel ?? "t (years)",
    spec.yLabel ?? "x (rate)",
    spec.title ?? "optimal state path with impulses",
  );
  doc.polyline(
    ts.map((t, i) => [axesRight.sx(t), axesRight.sy(states[i])] as [number, number]),
    "#444444",
    1.5,
  );
  for (let i = 0; i < actions.length; i++) {
    if (actions[i] !== "xi" && actions[i] !== "eta") continue;
    const cx = axesRight.sx(ts[i]);
    const cy = axesRight.sy(states[i]);
    if (actions[i] === "xi") {
      doc.polygon(
        [
          [cx, cy - 6],
          [cx - 5, cy + 4],
          [cx + 5, cy + 4],
        ],
        "#c23b3b",
        "marker-max",
      );
    } else {
      doc.polygon(
        [
          [cx, cy + 6],
          [cx - 5, cy - 4],
          [cx + 5, cy - 4],
        ],
        "#3b6fc2",
        "marker-min",
      );
    }
  }
  doc.text(right.x + 6, right.y + 14, "triangle up: maximizer impulse", { size: 9 });
  doc.text(right.x + 6, right.y + 26, "triangle down: minimizer impulse", { size: 9 });
  return doc.toString();
}

export function renderToString(spec: FigureSpec): string {
  switch (spec.kind) {
    case "surface":
      return renderSurface(spec);
    case "slice":
      return renderSlice(spec);
    case "regions":
      return renderRegions(spec);
    case "path":
      return renderPath(spec);
    default:
      throw new SchemaError(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}

export function render(spec: FigureSpec): void {
  writeFileSync(spec.output, renderToString(spec), "utf8");
}
