/**
 * Render solver trace CSVs as a log-log SVG figure.
 *
 *   node dist/cli.js run_seed1.csv run_seed2.csv --column gap \
 *        --x epoch --guides -1,-2 --aggregate median --out figure.svg
 *
 * All input files must share the trace CSV schema; seeds of the same
 * (method, schedule) pair are aggregated point-wise (median by
 * default).  Guide lines are anchored at the first plotted point.
 */

import { readFileSync, writeFileSync } from "fs";

import { Aggregation, XAxis, extractSeries } from "./aggregate.js";
import { NUMERIC_COLUMNS, NumericColumn, TraceRow, parseTraceCsv } from "./csv.js";
import { renderLogLog } from "./render.js";

export interface PlotSpec {
  inputs: string[];
  column: NumericColumn;
  x: XAxis;
  guides: number[];
  aggregate: Aggregation;
  out: string;
  title?: string;
}

export function parseArgs(argv: string[]): PlotSpec {
  const spec: PlotSpec = {
    inputs: [],
    column: "gap",
    x: "epoch",
    guides: [-1, -2],
    aggregate: "median",
    out: "figure.svg",
  };
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${arg}`);
      return argv[i];
    };
    switch (arg) {
      case "--column": {
        const column = next();
        if (!NUMERIC_COLUMNS.includes(column as NumericColumn)) {
          throw new Error(`unknown column "${column}" (pick from ${NUMERIC_COLUMNS.join(", ")})`);
        }
        spec.column = column as NumericColumn;
        break;
      }
      case "--x": {
        const x = next();
        if (x !== "epoch" && x !== "k") throw new Error(`--x must be epoch or k, got ${x}`);
        spec.x = x;
        break;
      }
      case "--guides":
        spec.guides = next()
          .split(",")
          .filter((s) => s !== "")
          .map((s) => {
            const v = Number(s);
            if (!Number.isFinite(v)) throw new Error(`bad guide slope ${s}`);
            return v;
          });
        break;
      case "--aggregate": {
        const agg = next();
        if (agg !== "median" && agg !== "single") {
          throw new Error(`--aggregate must be median or single, got ${agg}`);
        }
        spec.aggregate = agg;
        break;
      }
      case "--out":
        spec.out = next();
        break;
      case "--title":
        spec.title = next();
        break;
      default:
        if (arg.startsWith("--")) throw new Error(`unknown flag ${arg}`);
        spec.inputs.push(arg);
    }
  }
  if (spec.inputs.length === 0) {
    throw new Error("no input CSVs given");
  }
  return spec;
}

export function renderSpec(spec: PlotSpec): string {
  const rows: TraceRow[] = [];
  for (const path of spec.inputs) {
    rows.push(...parseTraceCsv(readFileSync(path, "utf8"), path));
  }
  const series = extractSeries(rows, spec.column, spec.x, spec.aggregate);
  return renderLogLog(series, {
    guides: spec.guides,
    xLabel: spec.x,
    yLabel: spec.column,
    title: spec.title,
  });
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
    writeFileSync(spec.out, renderSpec(spec));
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  console.log(`wrote ${spec.out}`);
  return 0;
}

if (process.argv[1] !== undefined && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
