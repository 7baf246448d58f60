/**
 * Reader for the solver trace CSV schema.
 *
 * Header: method,schedule,seed,k,epoch,primal,dual,gap,feas,dual_violation,time_ms
 * An empty cell means undefined/infinite and is surfaced as null.
 */

export const CSV_HEADER =
  "method,schedule,seed,k,epoch,primal,dual,gap,feas,dual_violation,time_ms";

export interface TraceRow {
  method: string;
  schedule: string;
  seed: number;
  k: number;
  epoch: number;
  primal: number | null;
  dual: number | null;
  gap: number | null;
  feas: number | null;
  dual_violation: number | null;
  time_ms: number | null;
}

export type NumericColumn = "primal" | "dual" | "gap" | "feas" | "dual_violation";

export const NUMERIC_COLUMNS: NumericColumn[] = [
  "primal",
  "dual",
  "gap",
  "feas",
  "dual_violation",
];

function cell(value: string): number | null {
  if (value === "") return null;
  const parsed = Number(value);
  if (!Number.isFinite(parsed)) {
    throw new Error(`bad numeric cell: ${value}`);
  }
  return parsed;
}

export function parseTraceCsv(text: string, source = "<string>"): TraceRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== CSV_HEADER) {
    throw new Error(`${source}: expected trace CSV header "${CSV_HEADER}"`);
  }
  return lines.slice(1).map((line, index) => {
    const parts = line.split(",");
    if (parts.length !== 11) {
      throw new Error(`${source}:${index + 2}: expected 11 cells, got ${parts.length}`);
    }
    return {
      method: parts[0],
      schedule: parts[1],
      seed: Number(parts[2]),
      k: Number(parts[3]),
      epoch: Number(parts[4]),
      primal: cell(parts[5]),
      dual: cell(parts[6]),
      gap: cell(parts[7]),
      feas: cell(parts[8]),
      dual_violation: cell(parts[9]),
      time_ms: cell(parts[10]),
    };
  });
}
