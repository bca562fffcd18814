/**
 * Minimal deterministic SVG document builder: scales, axes, and shape
 * helpers.  No DOM, no canvas; output is a plain string so identical
 * inputs produce byte-identical figures.
 */

export interface Margin {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export interface Panel {
  x: number;
  y: number;
  width: number;
  height: number;
}

export type Scale = (value: number) => number;

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  return (value) => r0 + ((value - d0) / span) * (r1 - r0);
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

const fmt = (v: number): string => {
  const rounded = Math.round(v * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
};

export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  raw(markup: string): void {
    this.parts.push(markup);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, cls?: string): void {
    const klass = cls ? ` class="${cls}"` : "";
    this.parts.push(`<rect${klass} x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333", width = 1): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline points="${path}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  polygon(points: Array<[number, number]>, fill: string, cls?: string): void {
    const klass = cls ? ` class="${cls}"` : "";
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polygon${klass} points="${path}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, options: { size?: number; anchor?: string; rotate?: number } = {}): void {
    const size = options.size ?? 11;
    const anchor = options.anchor ?? "start";
    const rotate = options.rotate ? ` transform="rotate(${options.rotate} ${fmt(x)} ${fmt(y)})"` : "";
    const escaped = content.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}"${rotate}>${escaped}</text>`,
    );
  }

  toString(): string {
    return [...this.parts, "</svg>"].join("\n") + "\n";
  }
}

/** Axes, tick labels, and axis titles around a panel. */
export function drawAxes(
  doc: SvgDoc,
  panel: Panel,
  xDomain: [number, number],
  yDomain: [number, number],
  xLabel: string,
  yLabel: string,
  title?: string,
): { sx: Scale; sy: Scale } {
  const sx = linearScale(xDomain, [panel.x, panel.x + panel.width]);
  const sy = linearScale(yDomain, [panel.y + panel.height, panel.y]);
  doc.line(panel.x, panel.y + panel.height, panel.x + panel.width, panel.y + panel.height);
  doc.line(panel.x, panel.y, panel.x, panel.y + panel.height);
  for (const t of ticks(xDomain)) {
    const px = sx(t);
    doc.line(px, panel.y + panel.height, px, panel.y + panel.height + 4);
    doc.text(px, panel.y + panel.height + 16, fmt(t), { anchor: "middle", size: 9 });
  }
  for (const t of ticks(yDomain)) {
    const py = sy(t);
    doc.line(panel.x - 4, py, panel.x, py);
    doc.text(panel.x - 6, py + 3, fmt(t), { anchor: "end", size: 9 });
  }
  doc.text(panel.x + panel.width / 2, panel.y + panel.height + 32, xLabel, { anchor: "middle" });
  doc.text(panel.x - 38, panel.y + panel.height / 2, yLabel, { anchor: "middle", rotate: -90 });
  if (title) doc.text(panel.x + panel.width / 2, panel.y - 8, title, { anchor: "middle", size: 12 });
  return { sx, sy };
}

const VIRIDIS: Array<[number, number, number]> = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

/** Piecewise-linear interpolation through viridis anchor colors. */
export function colorScale(vmin: number, vmax: number): (value: number) => string {
  const span = vmax - vmin === 0 ? 1 : vmax - vmin;
  return (value) => {
    const u = Math.min(1, Math.max(0, (value - vmin) / span));
    const pos = u * (VIRIDIS.length - 1);
    const i = Math.min(VIRIDIS.length - 2, Math.floor(pos));
    const w = pos - i;
    const mix = (a: number, b: number) => Math.round(a + (b - a) * w);
    const [r0, g0, b0] = VIRIDIS[i];
    const [r1, g1, b1] = VIRIDIS[i + 1];
    return `rgb(${mix(r0, r1)},${mix(g0, g1)},${mix(b0, b1)})`;
  };
}

export function drawColorbar(
  doc: SvgDoc,
  x: number,
  y: number,
  height: number,
  vmin: number,
  vmax: number,
  label: string,
): void {
  const color = colorScale(vmin, vmax);
  const steps = 64;
  for (let i = 0; i < steps; i++) {
    const v = vmin + ((vmax - vmin) * i) / (steps - 1);
    const py = y + height - ((i + 1) * height) / steps;
    doc.rect(x, py, 12, height / steps + 0.5, color(v));
  }
  doc.text(x + 16, y + height, fmt(vmin), { size: 9 });
  doc.text(x + 16, y + 8, fmt(vmax), { size: 9 });
  doc.text(x + 6, y - 8, label, { anchor: "middle", size: 10 });
}
