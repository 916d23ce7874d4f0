export { parseCsv, readCsvFile, column, numericColumn, cumulativeTrapezoid } from "./csv.js";
export { plotRates } from "./rates.js";
export type { Image, PlotResult } from "./rates.js";
export { plotDiagnostics } from "./diagnostics.js";
export { plotSnapshots } from "./snapshots.js";
export { main } from "./cli.js";
