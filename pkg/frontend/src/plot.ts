/**
 * plotRegret: harness CSVs in, one labeled figure file out.
 */
import { readFileSync, writeFileSync } from "fs";

import { parseTraces, type TraceRow } from "./csv.js";
import { buildSeries } from "./series.js";
import { renderFigure } from "./svg.js";

export interface PlotSpec {
  /** Input trace CSVs (harness schema); at least one. */
  inputs: string[];
  /** Output image path; must end in .svg (raster output is not supported). */
  output: string;
  /** Log-scaled x axis (default true, matching the regret figures). */
  logX?: boolean;
  /** Optional per-algorithm colors; labels must stay unique. */
  colors?: Record<string, string>;
  title?: string;
}

export function validateSpec(spec: PlotSpec): void {
  if (!spec.inputs || spec.inputs.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  if (!spec.output.endsWith(".svg")) {
    throw new Error(
      `unsupported output format for "${spec.output}": only .svg is produced`,
    );
  }
  if (spec.colors) {
    const labels = Object.keys(spec.colors);
    if (new Set(labels).size !== labels.length) {
      throw new Error("duplicate labels in the color map");
    }
  }
}

/** Reads the inputs (read-only), renders the figure, writes the output. */
export function plotRegret(spec: PlotSpec): string {
  validateSpec(spec);
  const rows: TraceRow[] = [];
  for (const path of spec.inputs) {
    rows.push(...parseTraces(readFileSync(path, "utf8"), path));
  }
  if (rows.length === 0) {
    throw new Error("no trace rows found in the inputs");
  }
  const series = buildSeries(rows);
  const svg = renderFigure(series, {
    logX: spec.logX ?? true,
    colors: spec.colors,
    title: spec.title,
  });
  writeFileSync(spec.output, svg);
  return spec.output;
}
