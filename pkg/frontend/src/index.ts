export { CSV_COLUMNS, isColumnName, type ColumnName } from "./columns.js";
export { loadTable, type Row, type Table } from "./csv.js";
export {
  DataError,
  EmptyCsvError,
  RecipeError,
  RenderFailure,
} from "./errors.js";
export {
  figureRecipeSchema,
  loadRecipe,
  parseRecipe,
  type AxisSpec,
  type FigureRecipe,
  type GuideSpec,
  type SeriesSpec,
} from "./recipe.js";
export { renderRecipe, renderRecipeFile, type RenderResult } from "./render.js";
export { formatTick, linearScale, logScale, makeScale, type Scale, type Tick } from "./scale.js";
export { selectSeries, type Point, type Series } from "./series.js";
export { buildFigure, layoutFigure, HEIGHT, WIDTH } from "./svg.js";
