#!/usr/bin/env node
/**
 * plot-regret --input traces.csv [--input more.csv ...] --output out.svg
 *              [--linear-x] [--title "..."]
 */
import { CsvSchemaError } from "./csv.js";
import { plotRegret, type PlotSpec } from "./plot.js";

function usage(): never {
  console.error(
    "usage: plot-regret --input <csv> [--input <csv> ...] --output <svg> " +
      "[--linear-x] [--title <text>]",
  );
  process.exit(1);
}

function parseArgs(argv: string[]): PlotSpec {
  const inputs: string[] = [];
  let output: string | undefined;
  let logX = true;
  let title: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--input") {
      if (++i >= argv.length) usage();
      inputs.push(argv[i]);
    } else if (arg === "--output") {
      if (++i >= argv.length) usage();
      output = argv[i];
    } else if (arg === "--linear-x") {
      logX = false;
    } else if (arg === "--title") {
      if (++i >= argv.length) usage();
      title = argv[i];
    } else {
      console.error(`unknown argument: ${arg}`);
      usage();
    }
  }
  if (inputs.length === 0 || !output) usage();
  return { inputs, output, logX, title };
}

try {
  const spec = parseArgs(process.argv.slice(2));
  const path = plotRegret(spec);
  console.log(`figure written to ${path}`);
} catch (err) {
  if (err instanceof CsvSchemaError) {
    console.error(`parse error: ${err.message}`);
  } else {
    console.error(String(err instanceof Error ? err.message : err));
  }
  process.exit(1);
}
