/**
 * Solution snapshots: a panel grid of f and g profiles at output times,
 * with the worst mirror asymmetry recomputed from the CSV and annotated.
 */
import { existsSync } from "fs";
import { join } from "path";
import { numericColumn, readCsvFile } from "./csv.js";
import { Svg, drawFrame, padLinearDomain } from "./svg.js";
import type { PlotResult } from "./rates.js";

const MAX_PANELS = 8;

interface Snapshot {
  t: number;
  x: number[];
  f: number[];
  g: number[];
}

function groupSnapshots(dir: string): Snapshot[] {
  const path = join(dir, "snapshots.csv");
  if (!existsSync(path)) {
    throw new Error(`no snapshots.csv in ${dir}`);
  }
  const table = readCsvFile(path);
  if (table.rows.length === 0) {
    return [];
  }
  const file = "snapshots.csv";
  const t = numericColumn(table, "t", file);
  const x = numericColumn(table, "x", file);
  const f = numericColumn(table, "f", file);
  const g = numericColumn(table, "g", file);
  const byTime = new Map<number, Snapshot>();
  for (let i = 0; i < t.length; i++) {
    if (!byTime.has(t[i])) {
      byTime.set(t[i], { t: t[i], x: [], f: [], g: [] });
    }
    const snap = byTime.get(t[i])!;
    snap.x.push(x[i]);
    snap.f.push(f[i]);
    snap.g.push(g[i]);
  }
  return [...byTime.values()].sort((a, b) => a.t - b.t);
}

function selectPanels(snaps: Snapshot[]): Snapshot[] {
  if (snaps.length <= MAX_PANELS) {
    return snaps;
  }
  const picked: Snapshot[] = [];
  for (let k = 0; k < MAX_PANELS; k++) {
    picked.push(snaps[Math.round((k * (snaps.length - 1)) / (MAX_PANELS - 1))]);
  }
  return picked;
}

function maxAsymmetry(values: number[]): number {
  let worst = 0;
  const n = values.length;
  for (let i = 0; i < n; i++) {
    worst = Math.max(worst, Math.abs(values[i] - values[n - 1 - i]));
  }
  return worst;
}

export function plotSnapshots(dir: string): PlotResult {
  const snaps = groupSnapshots(dir);
  if (snaps.length === 0) {
    return { images: [], warnings: ["snapshots.csv has no data rows; nothing to plot"] };
  }
  const panels = selectPanels(snaps);
  const cols = Math.min(2, panels.length);
  const rowsCount = Math.ceil(panels.length / cols);
  const panelW = 400;
  const panelH = 240;
  const svg = new Svg(60 + cols * (panelW + 40), 70 + rowsCount * (panelH + 60));

  const asym = Math.max(
    ...snaps.map((s) => Math.max(maxAsymmetry(s.f), maxAsymmetry(s.g))),
  );
  svg.text(60, 24, `profiles at ${panels.length} of ${snaps.length} output times; ` +
    `max asymmetry = ${asym.toExponential(3)}`, { size: 12 });

  const yAll = panels.flatMap((s) => [...s.f, ...s.g]);
  const yDomain = padLinearDomain(yAll);
  panels.forEach((snap, k) => {
    const cx = 60 + (k % cols) * (panelW + 40);
    const cy = 60 + Math.floor(k / cols) * (panelH + 60);
    const frame = drawFrame(svg, { x0: cx, y0: cy, x1: cx + panelW, y1: cy + panelH },
      padLinearDomain(snap.x), yDomain,
      { xLabel: "x", title: `t = ${snap.t}` });
    svg.polyline(snap.x.map((x, i) => [frame.sx(x), frame.sy(snap.f[i])]), "#1f5fa8", 1.6);
    svg.polyline(snap.x.map((x, i) => [frame.sx(x), frame.sy(snap.g[i])]), "#c44e52", 1.6, "5,3");
    if (k === 0) {
      svg.text(cx + 8, cy + 14, "f", { fill: "#1f5fa8" });
      svg.text(cx + 24, cy + 14, "g", { fill: "#c44e52" });
    }
  });
  return { images: [{ name: "snapshots.svg", svg: svg.render() }], warnings: [] };
}
