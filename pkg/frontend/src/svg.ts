/**
 * Static SVG rendering: cumulative-regret curves on a log-x, linear-y
 * plane with decade gridlines, a min-max band per series and a legend.
 */
import type { Series } from "./series.js";

export interface FigureOptions {
  logX: boolean;
  width?: number;
  height?: number;
  colors?: Record<string, string>;
  title?: string;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

const MARGIN = { top: 36, right: 24, bottom: 52, left: 76 };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function niceCeil(v: number): number {
  if (v <= 0) return 1;
  const mag = Math.pow(10, Math.floor(Math.log10(v)));
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= v) return m * mag;
  }
  return 10 * mag;
}

export function renderFigure(series: Series[], opts: FigureOptions): string {
  const width = opts.width ?? 880;
  const height = opts.height ?? 560;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const allSteps = series.flatMap((s) => s.steps);
  const allVals = series.flatMap((s) => s.max);
  const xMin = Math.max(1, Math.min(...allSteps));
  const xMax = Math.max(...allSteps);
  const yMax = niceCeil(Math.max(...allVals, 1e-12));

  const xPos = (step: number): number => {
    if (opts.logX) {
      const a = Math.log10(xMin);
      const b = Math.log10(Math.max(xMax, xMin * 10 ** 1e-9));
      const t = b > a ? (Math.log10(step) - a) / (b - a) : 0.5;
      return MARGIN.left + t * plotW;
    }
    const t = xMax > xMin ? (step - xMin) / (xMax - xMin) : 0.5;
    return MARGIN.left + t * plotW;
  };
  const yPos = (v: number): number => MARGIN.top + (1 - v / yMax) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (opts.title) {
    parts.push(
      `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">${esc(opts.title)}</text>`,
    );
  }

  // x gridlines and labels
  if (opts.logX) {
    const loDec = Math.floor(Math.log10(xMin));
    const hiDec = Math.ceil(Math.log10(xMax));
    for (let d = loDec; d <= hiDec; d++) {
      const step = 10 ** d;
      if (step < xMin || step > xMax) continue;
      const x = xPos(step);
      parts.push(
        `<line x1="${x.toFixed(1)}" y1="${MARGIN.top}" x2="${x.toFixed(1)}" ` +
          `y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
      );
      parts.push(
        `<text x="${x.toFixed(1)}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" ` +
          `font-size="12">1e${d}</text>`,
      );
    }
  } else {
    for (let i = 0; i <= 5; i++) {
      const step = xMin + ((xMax - xMin) * i) / 5;
      const x = xPos(step);
      parts.push(
        `<line x1="${x.toFixed(1)}" y1="${MARGIN.top}" x2="${x.toFixed(1)}" ` +
          `y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
      );
      parts.push(
        `<text x="${x.toFixed(1)}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" ` +
          `font-size="12">${Math.round(step)}</text>`,
      );
    }
  }
  // y gridlines and labels
  for (let i = 0; i <= 5; i++) {
    const v = (yMax * i) / 5;
    const y = yPos(v);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(1)}" x2="${MARGIN.left + plotW}" ` +
        `y2="${y.toFixed(1)}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${(y + 4).toFixed(1)}" text-anchor="end" ` +
        `font-size="12">${v >= 1000 ? v.toExponential(1) : v.toPrecision(3)}</text>`,
    );
  }
  // axes
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" text-anchor="middle" ` +
      `font-size="13">comparisons${opts.logX ? " (log scale)" : ""}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">cumulative regret</text>`,
  );

  // series bands, curves, legend
  series.forEach((s, idx) => {
    const color = opts.colors?.[s.label] ?? PALETTE[idx % PALETTE.length];
    if (s.steps.length === 0) return;
    const pts = (vals: number[]) =>
      s.steps.map((st, i) => `${xPos(st).toFixed(2)},${yPos(vals[i]).toFixed(2)}`);
    if (s.replicates > 1) {
      const band = [...pts(s.max), ...pts(s.min).reverse()].join(" ");
      parts.push(
        `<polygon points="${band}" fill="${color}" fill-opacity="0.15" stroke="none"/>`,
      );
    }
    parts.push(
      `<polyline points="${pts(s.mean).join(" ")}" fill="none" stroke="${color}" ` +
        `stroke-width="1.8" data-series="${esc(s.label)}"/>`,
    );
    const ly = MARGIN.top + 16 + idx * 18;
    const lx = MARGIN.left + plotW - 150;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 24}" y2="${ly - 4}" ` +
        `stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${lx + 30}" y="${ly}" font-size="12">${esc(s.label)} ` +
        `(${s.replicates} rep${s.replicates === 1 ? "" : "s"})</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
