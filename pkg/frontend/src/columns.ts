/**
 * Column contract of the CSV files written by `symdesigns run`.
 *
 * Every output CSV carries exactly these 27 columns, in this order.
 * Cells that do not apply to a row are empty strings.  Recipes may only
 * reference names from this list; loaders reject files whose header
 * deviates from it.
 */
export const CSV_COLUMNS = [
  "experiment",
  "tag",
  "metric",
  "n_total",
  "n_a",
  "n_b",
  "local_dim",
  "sector",
  "sector_param",
  "basis",
  "basis_detail",
  "t",
  "tau",
  "alpha",
  "boundary",
  "disorder_variance",
  "realization",
  "generator",
  "sample_index",
  "b_index",
  "window_lo",
  "window_hi",
  "value",
  "stderr",
  "sample_count",
  "r_squared",
  "dropped_mass",
] as const;

export type ColumnName = (typeof CSV_COLUMNS)[number];

export function isColumnName(name: string): name is ColumnName {
  return (CSV_COLUMNS as readonly string[]).includes(name);
}
