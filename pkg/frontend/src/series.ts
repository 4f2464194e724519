/** Turning filtered CSV rows into plottable point series. */
import { type ColumnName } from "./columns.js";
import { type Row, type Table } from "./csv.js";
import { DataError } from "./errors.js";
import { type SeriesSpec } from "./recipe.js";

export interface Point {
  x: number;
  y: number;
  yerr?: number;
}

export interface Series {
  label: string;
  draw: "line" | "level";
  style: SeriesSpec["style"];
  points: Point[];
}

function cellMatches(cell: string, want: string | number): boolean {
  if (typeof want === "number") {
    const parsed = Number(cell);
    return Number.isFinite(parsed) && parsed === want;
  }
  return cell === want;
}

function numericCell(row: Row, column: ColumnName, context: string): number {
  const cell = row[column];
  if (cell === "" || cell === undefined) {
    throw new DataError(`${context}: column ${column} is blank`);
  }
  const parsed = Number(cell);
  if (!Number.isFinite(parsed)) {
    throw new DataError(
      `${context}: column ${column} holds non-numeric cell "${cell}"`,
    );
  }
  return parsed;
}

/**
 * Rows matching every filter entry of `spec`, as numeric points sorted
 * by x.  "level" series ignore x and produce one point per matched row.
 */
export function selectSeries(table: Table, spec: SeriesSpec): Series {
  const entries = Object.entries(spec.filter) as [ColumnName, string | number][];
  const matched = table.rows.filter((row) =>
    entries.every(([column, want]) => cellMatches(row[column], want)),
  );
  if (matched.length === 0) {
    throw new DataError(
      `no rows in ${table.path} match ${JSON.stringify(spec.filter)} ` +
        `for series "${spec.label}"`,
    );
  }
  const context = `series "${spec.label}" from ${table.path}`;
  const points = matched.map((row): Point => {
    const y = numericCell(row, spec.y as ColumnName, context);
    if (spec.draw === "level") {
      return { x: 0, y };
    }
    const x = numericCell(row, spec.x as ColumnName, context);
    const point: Point = { x, y };
    if (spec.yerr !== undefined) {
      point.yerr = numericCell(row, spec.yerr as ColumnName, context);
    }
    return point;
  });
  if (spec.draw === "line") {
    points.sort((a, b) => a.x - b.x);
  }
  return { label: spec.label, draw: spec.draw, style: spec.style, points };
}
