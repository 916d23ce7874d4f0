#!/usr/bin/env node
/**
 * figures --in DIR --kind {rates,diagnostics,snapshots} --out PATH
 *
 * Reads the run directory's CSV outputs and writes SVG figures under PATH.
 * Exit codes: 0 success (including warned no-ops), 1 bad input or schema.
 */
import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import { plotDiagnostics } from "./diagnostics.js";
import { plotRates } from "./rates.js";
import { plotSnapshots } from "./snapshots.js";
import type { PlotResult } from "./rates.js";

const KINDS: Record<string, (dir: string) => PlotResult> = {
  rates: plotRates,
  diagnostics: plotDiagnostics,
  snapshots: plotSnapshots,
};

function parseArgs(argv: string[]): { inDir: string; kind: string; out: string } {
  const args: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`unexpected argument '${key}'`);
    }
    args[key.slice(2)] = value;
  }
  const inDir = args["in"];
  const kind = args["kind"];
  const out = args["out"];
  if (!inDir || !kind || !out) {
    throw new Error("usage: figures --in DIR --kind {rates,diagnostics,snapshots} --out PATH");
  }
  if (!(kind in KINDS)) {
    throw new Error(`unknown kind '${kind}'; choose rates, diagnostics or snapshots`);
  }
  return { inDir, kind, out };
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  try {
    const result = KINDS[parsed.kind](parsed.inDir);
    for (const warning of result.warnings) {
      console.error(`warning: ${warning}`);
    }
    if (result.images.length === 0) {
      console.error("nothing to plot");
      return 0;
    }
    mkdirSync(parsed.out, { recursive: true });
    for (const image of result.images) {
      const path = join(parsed.out, image.name);
      writeFileSync(path, image.svg + "\n");
      console.log(path);
    }
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
