/**
 * Minimal CSV reading for the simulation output schemas.
 * Values are plain (no quoting is ever emitted by the producer).
 */
import { readFileSync } from "fs";

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    return { header: [], rows: [] };
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  return { header, rows };
}

export function readCsvFile(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Column by name; throws a message naming the missing column. */
export function column(table: Table, name: string, file = "csv"): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${file} is missing column '${name}'`);
  }
  return table.rows.map((row) => row[idx]);
}

export function numericColumn(table: Table, name: string, file = "csv"): number[] {
  return column(table, name, file).map((value) => {
    const parsed = Number(value);
    if (!Number.isFinite(parsed)) {
      throw new Error(`${file}: non-numeric value '${value}' in column '${name}'`);
    }
    return parsed;
  });
}

/** Cumulative trapezoid of y over t, starting at 0 (ledger arithmetic). */
export function cumulativeTrapezoid(t: number[], y: number[]): number[] {
  const out = [0];
  for (let i = 1; i < t.length; i++) {
    out.push(out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]));
  }
  return out;
}
