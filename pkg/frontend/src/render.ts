/**
 * Rendering a recipe: load its CSV inputs, pull out the requested
 * series, and write one SVG.  The data path is strictly CSV in, image
 * out; nothing is recomputed from raw states here.
 */
import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { loadTable, type Table } from "./csv.js";
import { loadRecipe, type FigureRecipe } from "./recipe.js";
import { selectSeries, type Series } from "./series.js";
import { buildFigure } from "./svg.js";

export interface RenderResult {
  figure: string;
  outPath: string;
  svg: string;
}

/** Render an already-parsed recipe against CSVs under `dataDir`. */
export function renderRecipe(
  recipe: FigureRecipe,
  dataDir: string,
): Omit<RenderResult, "outPath"> {
  const tables = new Map<string, Table>();
  for (const input of recipe.inputs) {
    if (!tables.has(input.csv)) {
      tables.set(input.csv, loadTable(join(dataDir, input.csv)));
    }
  }
  const series: Series[] = recipe.inputs.flatMap((input) => {
    const table = tables.get(input.csv);
    if (table === undefined) {
      throw new Error(`table ${input.csv} vanished from the cache`);
    }
    return input.series.map((spec) => selectSeries(table, spec));
  });
  return { figure: recipe.figure, svg: buildFigure(recipe, series) };
}

/** Render a recipe file and write its SVG under `outDir`. */
export function renderRecipeFile(
  recipePath: string,
  dataDir: string,
  outDir: string,
): RenderResult {
  const recipe = loadRecipe(recipePath);
  const { figure, svg } = renderRecipe(recipe, dataDir);
  mkdirSync(outDir, { recursive: true });
  const outPath = join(outDir, recipe.output);
  writeFileSync(outPath, svg, "utf8");
  return { figure, outPath, svg };
}
