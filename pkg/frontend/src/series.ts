/**
 * Aggregation of trace rows into per-algorithm plot series.
 *
 * Each algorithm is summarized on its own checkpoint grid: the steps
 * shared by all of its replicates (no interpolation across grids). The
 * band is the min-max envelope over replicates; with one replicate it
 * collapses onto the mean.
 */
import type { TraceRow } from "./csv.js";

export interface Series {
  label: string;
  replicates: number;
  steps: number[];
  mean: number[];
  min: number[];
  max: number[];
}

export function buildSeries(rows: TraceRow[]): Series[] {
  const byAlgorithm = new Map<string, Map<number, Map<number, number>>>();
  for (const row of rows) {
    let reps = byAlgorithm.get(row.algorithm);
    if (!reps) {
      reps = new Map();
      byAlgorithm.set(row.algorithm, reps);
    }
    let grid = reps.get(row.replicate);
    if (!grid) {
      grid = new Map();
      reps.set(row.replicate, grid);
    }
    grid.set(row.step, row.regret);
  }

  const out: Series[] = [];
  for (const [label, reps] of [...byAlgorithm.entries()].sort()) {
    const grids = [...reps.values()];
    let shared = [...grids[0].keys()];
    for (const grid of grids.slice(1)) {
      shared = shared.filter((s) => grid.has(s));
    }
    shared.sort((a, b) => a - b);
    const mean: number[] = [];
    const min: number[] = [];
    const max: number[] = [];
    for (const step of shared) {
      const vals = grids.map((g) => g.get(step)!);
      mean.push(vals.reduce((a, b) => a + b, 0) / vals.length);
      min.push(Math.min(...vals));
      max.push(Math.max(...vals));
    }
    out.push({ label, replicates: grids.length, steps: shared, mean, min, max });
  }
  return out;
}
