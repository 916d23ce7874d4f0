/**
 * Log-log error-vs-eps plots: scatter from errors.csv, fitted line and
 * annotated slope from rates.csv, reference line at the theoretical exponent.
 * One image per (quantity, measurement time).
 */
import { existsSync } from "fs";
import { join } from "path";
import { column, numericColumn, readCsvFile } from "./csv.js";
import { Svg, drawFrame, padLogDomain } from "./svg.js";

export interface Image {
  name: string;
  svg: string;
}

export interface PlotResult {
  images: Image[];
  warnings: string[];
}

interface RateRow {
  slope: number;
  intercept: number;
  rSquared: number;
  theoretical: number;
  pass: string;
}

function readRates(dir: string): Map<string, RateRow> {
  const fits = new Map<string, RateRow>();
  const path = join(dir, "rates.csv");
  if (!existsSync(path)) {
    return fits;
  }
  const table = readCsvFile(path);
  const quantity = column(table, "quantity", "rates.csv");
  const t = numericColumn(table, "t", "rates.csv");
  const slope = numericColumn(table, "slope", "rates.csv");
  const intercept = numericColumn(table, "intercept", "rates.csv");
  const r2 = numericColumn(table, "r_squared", "rates.csv");
  const theo = numericColumn(table, "theoretical_exponent", "rates.csv");
  const pass = column(table, "pass", "rates.csv");
  for (let i = 0; i < quantity.length; i++) {
    fits.set(`${quantity[i]}@${t[i]}`, {
      slope: slope[i],
      intercept: intercept[i],
      rSquared: r2[i],
      theoretical: theo[i],
      pass: pass[i],
    });
  }
  return fits;
}

export function plotRates(dir: string): PlotResult {
  const errorsPath = join(dir, "errors.csv");
  if (!existsSync(errorsPath)) {
    throw new Error(`no errors.csv in ${dir}`);
  }
  const table = readCsvFile(errorsPath);
  if (table.rows.length === 0) {
    return { images: [], warnings: ["errors.csv has no data rows; nothing to plot"] };
  }
  const eps = numericColumn(table, "epsilon", "errors.csv");
  const t = numericColumn(table, "t", "errors.csv");
  const quantity = column(table, "quantity", "errors.csv");
  const err = numericColumn(table, "error", "errors.csv");
  const fits = readRates(dir);

  const groups = new Map<string, Array<{ eps: number; err: number }>>();
  for (let i = 0; i < eps.length; i++) {
    const key = `${quantity[i]}@${t[i]}`;
    if (!groups.has(key)) {
      groups.set(key, []);
    }
    groups.get(key)!.push({ eps: eps[i], err: err[i] });
  }

  const images: Image[] = [];
  const warnings: string[] = [];
  for (const [key, points] of groups) {
    const [q, time] = key.split("@");
    const positive = points.filter((p) => p.err > 0);
    if (positive.length === 0) {
      warnings.push(`${key}: all errors are zero; skipped`);
      continue;
    }
    const svg = new Svg(460, 360);
    const frame = drawFrame(
      svg,
      { x0: 64, y0: 40, x1: 430, y1: 300 },
      padLogDomain(positive.map((p) => p.eps)),
      padLogDomain(positive.map((p) => p.err)),
      {
        xLog: true,
        yLog: true,
        xLabel: "eps",
        yLabel: `${q} at t = ${time}`,
        title: `${q}, t = ${time}`,
      },
    );
    for (const p of positive) {
      svg.circle(frame.sx(p.eps), frame.sy(p.err), 3.5, "#1f5fa8");
    }
    const fit = fits.get(key);
    const distinctEps = new Set(positive.map((p) => p.eps));
    if (fit && distinctEps.size >= 2) {
      const epsLo = Math.min(...positive.map((p) => p.eps));
      const epsHi = Math.max(...positive.map((p) => p.eps));
      const line = (e: number) => Math.exp(fit.intercept + fit.slope * Math.log(e));
      svg.polyline(
        [
          [frame.sx(epsLo), frame.sy(line(epsLo))],
          [frame.sx(epsHi), frame.sy(line(epsHi))],
        ],
        "#c44e52",
        1.8,
      );
      // Reference line at the theoretical exponent, anchored below the data.
      const anchor = line(epsHi) / 2;
      const ref = (e: number) => anchor * Math.pow(e / epsHi, fit.theoretical);
      svg.polyline(
        [
          [frame.sx(epsLo), frame.sy(ref(epsLo))],
          [frame.sx(epsHi), frame.sy(ref(epsHi))],
        ],
        "#777777",
        1.2,
        "5,4",
      );
      svg.text(70, 54, `slope = ${fit.slope.toFixed(3)} (r2 = ${fit.rSquared.toFixed(4)})`, {
        fill: "#c44e52",
      });
      svg.text(70, 70, `theory slope = ${fit.theoretical.toFixed(3)}`, { fill: "#777777" });
    } else if (!fit) {
      warnings.push(`${key}: no fit in rates.csv; scatter only`);
    } else {
      warnings.push(`${key}: single eps value; scatter without fit line`);
    }
    images.push({ name: `rates_${q}_t${time}.svg`, svg: svg.render() });
  }
  return { images, warnings };
}
