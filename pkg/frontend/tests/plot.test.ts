import { createHash } from "crypto";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { EXPECTED_HEADER } from "../src/csv.js";
import { plotRegret, validateSpec } from "../src/plot.js";

function sampleCsv(): string {
  const lines = [EXPECTED_HEADER];
  for (let rep = 0; rep < 3; rep++) {
    let cum = 0;
    for (const step of [1, 10, 100, 1000, 10000]) {
      cum += step * (0.01 + 0.002 * rep);
      lines.push(`ccb,${rep},${step},${cum.toPrecision(12)}`);
    }
    cum = 0;
    for (const step of [1, 10, 100, 1000, 10000]) {
      cum += step * 0.4;
      lines.push(`rucb,${rep},${step},${cum.toPrecision(12)}`);
    }
  }
  return lines.join("\n") + "\n";
}

function sha(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

describe("plotRegret", () => {
  it("renders a labeled log-x figure and leaves inputs untouched", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "traces.csv");
    writeFileSync(input, sampleCsv());
    const before = sha(input);
    const output = join(dir, "figure.svg");
    plotRegret({ inputs: [input], output });
    expect(sha(input)).toBe(before);
    const svg = readFileSync(output, "utf8");
    expect(svg).toContain("<svg");
    expect(svg).toContain('data-series="ccb"');
    expect(svg).toContain('data-series="rucb"');
    expect(svg).toContain("log scale");
    expect(svg).toContain("1e4"); // decade tick on the log axis
    expect(svg).toContain("cumulative regret");
    // two curves, each with a min-max band (3 replicates each)
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
    expect((svg.match(/<polygon/g) ?? []).length).toBe(2);
  });

  it("collapses the band for single-replicate input", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "one.csv");
    writeFileSync(
      input,
      `${EXPECTED_HEADER}\nccb,0,1,0.1\nccb,0,10,0.9\nccb,0,100,1.6\n`,
    );
    const output = join(dir, "one.svg");
    plotRegret({ inputs: [input], output });
    const svg = readFileSync(output, "utf8");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(1);
    expect((svg.match(/<polygon/g) ?? []).length).toBe(0);
  });

  it("merges multiple input files", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const a = join(dir, "a.csv");
    const b = join(dir, "b.csv");
    writeFileSync(a, `${EXPECTED_HEADER}\nccb,0,1,0.1\nccb,0,10,0.3\n`);
    writeFileSync(b, `${EXPECTED_HEADER}\nscb,0,1,0.2\nscb,0,10,0.8\n`);
    const output = join(dir, "ab.svg");
    plotRegret({ inputs: [a, b], output });
    const svg = readFileSync(output, "utf8");
    expect(svg).toContain('data-series="ccb"');
    expect(svg).toContain('data-series="scb"');
  });

  it("supports a linear x axis when asked", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "lin.csv");
    writeFileSync(input, `${EXPECTED_HEADER}\nccb,0,1,0.1\nccb,0,50,0.7\n`);
    const output = join(dir, "lin.svg");
    plotRegret({ inputs: [input], output, logX: false });
    expect(readFileSync(output, "utf8")).not.toContain("log scale");
  });

  it("rejects empty specs and non-svg outputs", () => {
    expect(() => validateSpec({ inputs: [], output: "x.svg" })).toThrowError(
      /at least one input/,
    );
    expect(() =>
      validateSpec({ inputs: ["a.csv"], output: "x.png" }),
    ).toThrowError(/only \.svg/);
  });

  it("propagates parse errors with their location", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "bad.csv");
    writeFileSync(input, `${EXPECTED_HEADER}\nccb,0,notanumber,1\n`);
    expect(() =>
      plotRegret({ inputs: [input], output: join(dir, "o.svg") }),
    ).toThrowError(/bad\.csv:2/);
  });
});
