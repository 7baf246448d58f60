/**
 * Series extraction: group rows by (method, schedule), optionally take
 * the median across seeds at each x, and keep only points a log-log
 * plot can show (finite and strictly positive).
 */

import { NumericColumn, TraceRow } from "./csv.js";

export type XAxis = "epoch" | "k";
export type Aggregation = "median" | "single";

export interface Series {
  label: string;
  xs: number[];
  ys: number[];
}

export function median(values: number[]): number {
  if (values.length === 0) {
    throw new Error("median of an empty sample");
  }
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 === 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

export function extractSeries(
  rows: TraceRow[],
  column: NumericColumn,
  x: XAxis,
  aggregation: Aggregation,
): Series[] {
  const groups = new Map<string, TraceRow[]>();
  for (const row of rows) {
    const label = row.schedule === "" ? row.method : `${row.method},${row.schedule}`;
    const bucket = groups.get(label);
    if (bucket === undefined) {
      groups.set(label, [row]);
    } else {
      bucket.push(row);
    }
  }
  const series: Series[] = [];
  for (const [label, bucket] of [...groups.entries()].sort()) {
    const byX = new Map<number, number[]>();
    for (const row of bucket) {
      const value = row[column];
      if (value === null) continue;
      const xv = row[x];
      const list = byX.get(xv);
      if (list === undefined) {
        byX.set(xv, [value]);
      } else {
        list.push(value);
      }
    }
    const xs: number[] = [];
    const ys: number[] = [];
    for (const xv of [...byX.keys()].sort((a, b) => a - b)) {
      const sample = byX.get(xv)!;
      const value = aggregation === "median" ? median(sample) : sample[0];
      // log-scale plots skip nonpositive and nonfinite values
      if (xv > 0 && value > 0 && Number.isFinite(value)) {
        xs.push(xv);
        ys.push(value);
      }
    }
    if (xs.length > 0) {
      series.push({ label, xs, ys });
    }
  }
  if (series.length === 0) {
    throw new Error(`no plottable points for column "${column}"`);
  }
  return series;
}
