/**
 * Hand-rolled SVG plotting: linear/log axes, polylines, scatter, legends.
 * Output is deterministic text so figures diff cleanly.
 */

export type Scale = (value: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return ticks;
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.log10(hi) + 1e-9; e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo];
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(0);
  return Number(v.toPrecision(4)).toString();
}

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#444", width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const pts = points.map(([x, y]) => `${r(x)},${r(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  circle(cx: number, cy: number, radius: number, fill: string): void {
    this.add(`<circle cx="${r(cx)}" cy="${r(cy)}" r="${radius}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, opts: { size?: number; anchor?: string; fill?: string } = {}): void {
    const { size = 11, anchor = "start", fill = "#222" } = opts;
    this.add(`<text x="${r(x)}" y="${r(y)}" font-size="${size}" text-anchor="${anchor}" fill="${fill}" font-family="Helvetica, Arial, sans-serif">${esc(content)}</text>`);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

function r(v: number): string {
  return Number(v.toFixed(2)).toString();
}

export interface Frame {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  sx: Scale;
  sy: Scale;
}

/** Draw a plot frame with ticks; y grows upward in data space. */
export function drawFrame(
  svg: Svg,
  box: { x0: number; y0: number; x1: number; y1: number },
  xDomain: [number, number],
  yDomain: [number, number],
  opts: { xLog?: boolean; yLog?: boolean; xLabel?: string; yLabel?: string; title?: string } = {},
): Frame {
  const sx = (opts.xLog ? logScale : linearScale)(xDomain[0], xDomain[1], box.x0, box.x1);
  const sy = (opts.yLog ? logScale : linearScale)(yDomain[0], yDomain[1], box.y1, box.y0);
  svg.line(box.x0, box.y1, box.x1, box.y1);
  svg.line(box.x0, box.y0, box.x0, box.y1);
  const xTicks = opts.xLog ? decadeTicks(xDomain[0], xDomain[1]) : niceTicks(xDomain[0], xDomain[1]);
  const yTicks = opts.yLog ? decadeTicks(yDomain[0], yDomain[1]) : niceTicks(yDomain[0], yDomain[1]);
  for (const t of xTicks) {
    const x = sx(t);
    svg.line(x, box.y1, x, box.y1 + 4);
    svg.text(x, box.y1 + 16, formatTick(t), { anchor: "middle", size: 10 });
  }
  for (const t of yTicks) {
    const y = sy(t);
    svg.line(box.x0 - 4, y, box.x0, y);
    svg.text(box.x0 - 7, y + 3, formatTick(t), { anchor: "end", size: 10 });
  }
  if (opts.xLabel) {
    svg.text((box.x0 + box.x1) / 2, box.y1 + 32, opts.xLabel, { anchor: "middle" });
  }
  if (opts.yLabel) {
    svg.text(box.x0, box.y0 - 8, opts.yLabel, { size: 11 });
  }
  if (opts.title) {
    svg.text((box.x0 + box.x1) / 2, box.y0 - 8, opts.title, { anchor: "middle", size: 12 });
  }
  return { ...box, sx, sy };
}

export function padLogDomain(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return [lo / 1.5, hi * 1.5];
}

export function padLinearDomain(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = (hi - lo || Math.abs(hi) || 1) * 0.08;
  return [lo - pad, hi + pad];
}
