/**
 * Parser for the simulation harness trace CSV.
 *
 * Schema (exact header): `algorithm,replicate,step,cumulative_regret`,
 * one row per checkpoint. Any deviation raises an error that names the
 * offending line.
 */

export const EXPECTED_HEADER = "algorithm,replicate,step,cumulative_regret";

export interface TraceRow {
  algorithm: string;
  replicate: number;
  step: number;
  regret: number;
}

export class CsvSchemaError extends Error {
  constructor(source: string, line: number, problem: string) {
    super(`${source}:${line}: ${problem}`);
    this.name = "CsvSchemaError";
  }
}

export function parseTraces(text: string, source = "<csv>"): TraceRow[] {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() !== EXPECTED_HEADER) {
    throw new CsvSchemaError(
      source,
      1,
      `expected header "${EXPECTED_HEADER}", got "${lines[0] ?? ""}"`,
    );
  }
  const rows: TraceRow[] = [];
  for (let n = 1; n < lines.length; n++) {
    const line = lines[n].trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== 4) {
      throw new CsvSchemaError(source, n + 1, `expected 4 fields, got ${parts.length}`);
    }
    const replicate = Number(parts[1]);
    const step = Number(parts[2]);
    const regret = Number(parts[3]);
    if (!Number.isInteger(replicate) || replicate < 0) {
      throw new CsvSchemaError(source, n + 1, `bad replicate "${parts[1]}"`);
    }
    if (!Number.isInteger(step) || step < 1) {
      throw new CsvSchemaError(source, n + 1, `bad step "${parts[2]}"`);
    }
    if (!Number.isFinite(regret)) {
      throw new CsvSchemaError(source, n + 1, `bad regret "${parts[3]}"`);
    }
    rows.push({ algorithm: parts[0], replicate, step, regret });
  }
  return rows;
}
