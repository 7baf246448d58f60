/**
 * Deterministic log-log SVG rendering with power-law guide lines.
 *
 * Guides are dashed lines y = y0 * (x/x0)^slope anchored at the first
 * plotted point of the first series, so a curve parallel to the -1
 * guide decays like 1/k.  Output carries no timestamps: rendering the
 * same data twice yields byte-identical files.
 */

import { Series } from "./aggregate.js";

export interface RenderOptions {
  title?: string;
  xLabel?: string;
  yLabel?: string;
  guides?: number[];
  width?: number;
  height?: number;
}

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { left: 64, right: 16, top: 28, bottom: 46 };

function fmt(value: number): string {
  return Number(value.toPrecision(6)).toString();
}

class LogScale {
  readonly lo: number;
  readonly hi: number;
  readonly a: number;
  readonly b: number;

  constructor(lo: number, hi: number, outLo: number, outHi: number) {
    if (!(lo > 0) || !(hi > 0)) {
      throw new Error("log scale needs positive bounds");
    }
    if (lo === hi) {
      lo = lo / 2;
      hi = hi * 2;
    }
    this.lo = lo;
    this.hi = hi;
    const span = Math.log10(hi) - Math.log10(lo);
    this.a = (outHi - outLo) / span;
    this.b = outLo - this.a * Math.log10(lo);
  }

  map(value: number): number {
    return this.a * Math.log10(value) + this.b;
  }

  ticks(): number[] {
    const out: number[] = [];
    const first = Math.ceil(Math.log10(this.lo));
    const last = Math.floor(Math.log10(this.hi));
    for (let e = first; e <= last; e += 1) {
      out.push(10 ** e);
    }
    return out;
  }
}

export function guideCurve(
  slope: number,
  anchorX: number,
  anchorY: number,
  xs: [number, number],
): [number, number][] {
  return xs.map((x) => [x, anchorY * (x / anchorX) ** slope] as [number, number]);
}

export function renderLogLog(series: Series[], options: RenderOptions = {}): string {
  const width = options.width ?? 640;
  const height = options.height ?? 440;
  const guides = options.guides ?? [];
  if (series.length === 0) {
    throw new Error("nothing to plot");
  }
  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const x0 = series[0].xs[0];
  const y0 = series[0].ys[0];
  const xMax = Math.max(...allX);
  for (const slope of guides) {
    for (const [, gy] of guideCurve(slope, x0, y0, [x0, xMax])) {
      allY.push(gy);
    }
  }
  const sx = new LogScale(Math.min(...allX), xMax, MARGIN.left, width - MARGIN.right);
  const sy = new LogScale(Math.min(...allY), Math.max(...allY), height - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  const axisY = height - MARGIN.bottom;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${width - MARGIN.right}" y2="${axisY}" stroke="#333"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="#333"/>`,
  );
  for (const t of sx.ticks()) {
    const px = fmt(sx.map(t));
    parts.push(
      `<line x1="${px}" y1="${axisY}" x2="${px}" y2="${axisY + 4}" stroke="#333"/>`,
      `<text x="${px}" y="${axisY + 18}" font-size="11" text-anchor="middle">1e${Math.log10(t)}</text>`,
    );
  }
  for (const t of sy.ticks()) {
    const py = fmt(sy.map(t));
    parts.push(
      `<line x1="${MARGIN.left - 4}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 7}" y="${py}" font-size="11" text-anchor="end" dominant-baseline="middle">1e${Math.log10(t)}</text>`,
    );
  }
  if (options.xLabel) {
    parts.push(
      `<text x="${(MARGIN.left + width - MARGIN.right) / 2}" y="${height - 10}" ` +
        `font-size="12" text-anchor="middle">${options.xLabel}</text>`,
    );
  }
  if (options.yLabel) {
    parts.push(
      `<text x="14" y="${(MARGIN.top + axisY) / 2}" font-size="12" text-anchor="middle" ` +
        `transform="rotate(-90 14 ${(MARGIN.top + axisY) / 2})">${options.yLabel}</text>`,
    );
  }
  if (options.title) {
    parts.push(
      `<text x="${(MARGIN.left + width - MARGIN.right) / 2}" y="18" font-size="13" ` +
        `text-anchor="middle">${options.title}</text>`,
    );
  }
  for (const slope of guides) {
    const pts = guideCurve(slope, x0, y0, [x0, xMax])
      .map(([gx, gy]) => `${fmt(sx.map(gx))},${fmt(sy.map(gy))}`)
      .join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="#999" stroke-dasharray="6,4"/>`,
    );
    const [endX, endY] = guideCurve(slope, x0, y0, [x0, xMax])[1];
    parts.push(
      `<text x="${fmt(sx.map(endX))}" y="${fmt(sy.map(endY) - 5)}" font-size="10" ` +
        `fill="#777" text-anchor="end">slope ${slope}</text>`,
    );
  }
  series.forEach((s, index) => {
    const color = COLORS[index % COLORS.length];
    const pts = s.xs.map((x, i) => `${fmt(sx.map(x))},${fmt(sy.map(s.ys[i]))}`).join(" ");
    parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
    const ly = MARGIN.top + 14 + index * 15;
    parts.push(
      `<line x1="${width - MARGIN.right - 150}" y1="${ly - 4}" x2="${width - MARGIN.right - 126}" y2="${ly - 4}" stroke="${color}" stroke-width="1.6"/>`,
      `<text x="${width - MARGIN.right - 120}" y="${ly}" font-size="11">${s.label}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
