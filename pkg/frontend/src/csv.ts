/** Loading and checking the experiment CSV files. */
import { readFileSync } from "node:fs";

import Papa from "papaparse";

import { CSV_COLUMNS, type ColumnName } from "./columns.js";
import { DataError, EmptyCsvError } from "./errors.js";

export type Row = Record<ColumnName, string>;

export interface Table {
  readonly path: string;
  readonly rows: readonly Row[];
}

/**
 * Read one CSV and check its header against the column contract.
 * A file with no data rows is reported as empty rather than silently
 * producing a blank figure.
 */
export function loadTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new DataError(`input CSV not found: ${path}`);
  }
  if (text.trim() === "") {
    throw new EmptyCsvError(path);
  }
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const fatal = parsed.errors[0];
  if (fatal) {
    throw new DataError(`malformed CSV ${path}: ${fatal.message}`);
  }
  const header = parsed.meta.fields ?? [];
  const missing = CSV_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new DataError(
      `schema mismatch in ${path}: missing columns ${missing.join(", ")}`,
    );
  }
  if (parsed.data.length === 0) {
    throw new EmptyCsvError(path);
  }
  return { path, rows: parsed.data as Row[] };
}
