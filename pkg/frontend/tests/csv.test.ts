import { describe, expect, it } from "vitest";

import { CsvSchemaError, EXPECTED_HEADER, parseTraces } from "../src/csv.js";

const GOOD = [
  EXPECTED_HEADER,
  "ccb,0,1,0.5",
  "ccb,0,10,2.25",
  "rucb,1,1,0.333333333333",
  "",
].join("\n");

describe("parseTraces", () => {
  it("parses well-formed traces", () => {
    const rows = parseTraces(GOOD, "good.csv");
    expect(rows).toHaveLength(3);
    expect(rows[0]).toEqual({ algorithm: "ccb", replicate: 0, step: 1, regret: 0.5 });
    expect(rows[2].algorithm).toBe("rucb");
  });

  it("rejects a wrong header with the line number", () => {
    expect(() => parseTraces("step,regret\n1,2\n", "bad.csv")).toThrowError(
      /bad\.csv:1: expected header/,
    );
  });

  it("rejects a short row with its line number", () => {
    const text = `${EXPECTED_HEADER}\nccb,0,1\n`;
    try {
      parseTraces(text, "short.csv");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(CsvSchemaError);
      expect((err as Error).message).toContain("short.csv:2");
      expect((err as Error).message).toContain("expected 4 fields");
    }
  });

  it("rejects non-numeric fields", () => {
    expect(() =>
      parseTraces(`${EXPECTED_HEADER}\nccb,0,x,1.0\n`, "t.csv"),
    ).toThrowError(/t\.csv:2: bad step/);
    expect(() =>
      parseTraces(`${EXPECTED_HEADER}\nccb,0,1,oops\n`, "t.csv"),
    ).toThrowError(/t\.csv:2: bad regret/);
    expect(() =>
      parseTraces(`${EXPECTED_HEADER}\nccb,-1,1,1.0\n`, "t.csv"),
    ).toThrowError(/t\.csv:2: bad replicate/);
  });
});
