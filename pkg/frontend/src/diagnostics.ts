/**
 * Diagnostic time series: energy/entropy decay, conservation ledgers, and
 * the second-moment identity overlay.  Everything here is arithmetic on the
 * CSV columns; no simulation physics is recomputed.
 */
import { existsSync, readFileSync } from "fs";
import { join } from "path";
import { cumulativeTrapezoid, numericColumn, readCsvFile } from "./csv.js";
import { Svg, drawFrame, padLinearDomain } from "./svg.js";
import type { PlotResult } from "./rates.js";

function readDim(dir: string, warnings: string[]): number {
  const path = join(dir, "manifest.json");
  if (!existsSync(path)) {
    warnings.push("manifest.json missing; assuming dim = 1 for the moment overlay");
    return 1;
  }
  try {
    const manifest = JSON.parse(readFileSync(path, "utf8"));
    const dim = manifest?.extra?.dim ?? manifest?.config?.dim;
    if (dim === 1 || dim === 2) {
      return dim;
    }
  } catch {
    // fall through
  }
  warnings.push("manifest.json has no usable dim; assuming dim = 1");
  return 1;
}

export function plotDiagnostics(dir: string): PlotResult {
  const path = join(dir, "diagnostics.csv");
  if (!existsSync(path)) {
    throw new Error(`no diagnostics.csv in ${dir}`);
  }
  const table = readCsvFile(path);
  if (table.rows.length === 0) {
    return { images: [], warnings: ["diagnostics.csv has no data rows; nothing to plot"] };
  }
  const warnings: string[] = [];
  const file = "diagnostics.csv";
  const t = numericColumn(table, "t", file);
  const energy = numericColumn(table, "energy", file);
  const entropy = numericColumn(table, "entropy", file);
  const massF = numericColumn(table, "mass_f", file);
  const massG = numericColumn(table, "mass_g", file);
  const moment = numericColumn(table, "second_moment", file);
  const dissF = numericColumn(table, "diss_f", file);
  const dissH = numericColumn(table, "diss_h", file);
  const energyDiss = numericColumn(table, "energy_diss", file);
  const dim = readDim(dir, warnings);

  const cumEnergyDiss = cumulativeTrapezoid(t, energyDiss);
  const cumEntropyDiss = cumulativeTrapezoid(t, dissF.map((v, i) => v + dissH[i]));
  const energyLedger = energy.map((e, i) => e + cumEnergyDiss[i] - energy[0]);
  const entropyLedger = entropy.map((h, i) => h + cumEntropyDiss[i] - entropy[0]);
  // Moment identity: M(t) should track M(0) + d * int 2 E ds.
  const cumTwoEnergy = cumulativeTrapezoid(t, energy.map((e) => 2 * e));
  const momentPredicted = cumTwoEnergy.map((v) => moment[0] + dim * v);

  const svg = new Svg(920, 640);
  const tDomain = padLinearDomain(t);

  const f1 = drawFrame(svg, { x0: 70, y0: 40, x1: 440, y1: 270 }, tDomain,
    padLinearDomain([...energy, ...entropy]),
    { xLabel: "t", title: "energy and entropy" });
  svg.polyline(t.map((x, i) => [f1.sx(x), f1.sy(energy[i])]), "#1f5fa8");
  svg.polyline(t.map((x, i) => [f1.sx(x), f1.sy(entropy[i])]), "#c44e52");
  svg.text(80, 56, "energy", { fill: "#1f5fa8" });
  svg.text(80, 70, "entropy", { fill: "#c44e52" });

  const massDev = [...massF, ...massG].map((m) => m - 1.0);
  const f2 = drawFrame(svg, { x0: 540, y0: 40, x1: 890, y1: 270 }, tDomain,
    padLinearDomain(massDev),
    { xLabel: "t", title: "mass - 1 (conservation)" });
  svg.polyline(t.map((x, i) => [f2.sx(x), f2.sy(massF[i] - 1)]), "#1f5fa8");
  svg.polyline(t.map((x, i) => [f2.sx(x), f2.sy(massG[i] - 1)]), "#c44e52");
  svg.text(550, 56, "mass_f - 1", { fill: "#1f5fa8" });
  svg.text(550, 70, "mass_g - 1", { fill: "#c44e52" });

  const f3 = drawFrame(svg, { x0: 70, y0: 340, x1: 440, y1: 570 }, tDomain,
    padLinearDomain([...energyLedger, ...entropyLedger]),
    { xLabel: "t", title: "inequality ledgers (theory: <= 0)" });
  svg.polyline(t.map((x, i) => [f3.sx(x), f3.sy(energyLedger[i])]), "#1f5fa8");
  svg.polyline(t.map((x, i) => [f3.sx(x), f3.sy(entropyLedger[i])]), "#c44e52");
  if (f3.sy(0) >= f3.y0 && f3.sy(0) <= f3.y1) {
    svg.line(f3.x0, f3.sy(0), f3.x1, f3.sy(0), "#999", 0.8, "3,3");
  }
  const eMax = Math.max(...energyLedger);
  const hMax = Math.max(...entropyLedger);
  svg.text(80, 356, `energy ledger max = ${eMax.toExponential(3)}`, { fill: "#1f5fa8" });
  svg.text(80, 370, `entropy ledger max = ${hMax.toExponential(3)}`, { fill: "#c44e52" });

  const f4 = drawFrame(svg, { x0: 540, y0: 340, x1: 890, y1: 570 }, tDomain,
    padLinearDomain([...moment, ...momentPredicted]),
    { xLabel: "t", title: "second moment vs identity" });
  svg.polyline(t.map((x, i) => [f4.sx(x), f4.sy(moment[i])]), "#1f5fa8");
  svg.polyline(t.map((x, i) => [f4.sx(x), f4.sy(momentPredicted[i])]), "#c44e52", 1.5, "6,4");
  const residual = Math.max(...moment.map((m, i) => Math.abs(m - momentPredicted[i]))) /
    (moment[0] !== 0 ? moment[0] : 1);
  svg.text(550, 356, "M(t)", { fill: "#1f5fa8" });
  svg.text(550, 370, "M(0) + d*int 2E ds", { fill: "#c44e52" });
  svg.text(550, 384, `moment residual = ${residual.toExponential(3)}`);

  return { images: [{ name: "diagnostics.svg", svg: svg.render() }], warnings };
}
