import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { numericColumn, readCsvFile } from "../src/csv.js";
import { plotDiagnostics } from "../src/diagnostics.js";

const SWEEP = join(__dirname, "fixtures", "sweep");

/** Independent ledger recomputation straight from the CSV columns. */
function ledgerMaxima(dir: string): { energy: number; entropy: number } {
  const table = readCsvFile(join(dir, "diagnostics.csv"));
  const t = numericColumn(table, "t");
  const energy = numericColumn(table, "energy");
  const entropy = numericColumn(table, "entropy");
  const energyDiss = numericColumn(table, "energy_diss");
  const dissF = numericColumn(table, "diss_f");
  const dissH = numericColumn(table, "diss_h");
  let cumE = 0;
  let cumH = 0;
  let eMax = -Infinity;
  let hMax = -Infinity;
  for (let i = 0; i < t.length; i++) {
    if (i > 0) {
      cumE += 0.5 * (energyDiss[i] + energyDiss[i - 1]) * (t[i] - t[i - 1]);
      cumH += 0.5 * (dissF[i] + dissH[i] + dissF[i - 1] + dissH[i - 1]) * (t[i] - t[i - 1]);
    }
    eMax = Math.max(eMax, energy[i] + cumE - energy[0]);
    hMax = Math.max(hMax, entropy[i] + cumH - entropy[0]);
  }
  return { energy: eMax, entropy: hMax };
}

describe("plotDiagnostics on a completed sweep directory", () => {
  const result = plotDiagnostics(SWEEP);

  it("produces one image without warnings", () => {
    expect(result.images.length).toBe(1);
    expect(result.images[0].name).toBe("diagnostics.svg");
  });

  it("annotated ledger maxima match the CSV recomputation to 3 decimals", () => {
    const expected = ledgerMaxima(SWEEP);
    const svg = result.images[0].svg;
    const eMatch = svg.match(/energy ledger max = (-?\d\.\d{3}e[+-]\d+)/);
    const hMatch = svg.match(/entropy ledger max = (-?\d\.\d{3}e[+-]\d+)/);
    expect(eMatch).not.toBeNull();
    expect(hMatch).not.toBeNull();
    expect(eMatch![1]).toBe(expected.energy.toExponential(3));
    expect(hMatch![1]).toBe(expected.entropy.toExponential(3));
  });

  it("ledgers on the benchmark run are non-positive", () => {
    const expected = ledgerMaxima(SWEEP);
    expect(expected.energy).toBeLessThanOrEqual(0);
    expect(expected.entropy).toBeLessThanOrEqual(0);
  });

  it("overlays the second-moment identity with a residual annotation", () => {
    const svg = result.images[0].svg;
    expect(svg).toContain("M(0) + d*int 2E ds");
    expect(svg.match(/moment residual = \d\.\d{3}e[+-]\d+/)).not.toBeNull();
  });
});

describe("plotDiagnostics edge cases", () => {
  it("warns on header-only diagnostics.csv", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    writeFileSync(
      join(dir, "diagnostics.csv"),
      "t,mass_f,mass_g,energy,entropy,second_moment,diss_f,diss_h,energy_diss,min_f,min_g,boundary_mass\n",
    );
    const result = plotDiagnostics(dir);
    expect(result.images).toEqual([]);
    expect(result.warnings[0]).toMatch(/no data rows/);
  });

  it("falls back to dim = 1 with a warning when the manifest is missing", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    writeFileSync(
      join(dir, "diagnostics.csv"),
      "t,mass_f,mass_g,energy,entropy,second_moment,diss_f,diss_h,energy_diss,min_f,min_g,boundary_mass\n" +
        "0.0,1.0,1.0,0.2,-1.0,3.0,0.1,0.01,0.05,0.0,0.0,0.0\n" +
        "0.5,1.0,1.0,0.18,-1.1,3.2,0.09,0.009,0.04,0.0,0.0,0.0\n",
    );
    const result = plotDiagnostics(dir);
    expect(result.images.length).toBe(1);
    expect(result.warnings.join(" ")).toMatch(/assuming dim = 1/);
  });

  it("names a missing column", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    writeFileSync(join(dir, "diagnostics.csv"), "t,energy\n0.0,0.2\n");
    expect(() => plotDiagnostics(dir)).toThrow(/missing column 'entropy'/);
  });
});
