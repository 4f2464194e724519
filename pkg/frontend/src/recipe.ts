/**
 * Figure recipes: small JSON documents that say which CSV files to read,
 * which rows become which curves, how the axes are scaled, and which
 * guide lines to overlay.  A recipe never carries data of its own; the
 * only numbers in it are axis limits, guide-line parameters, and anchor
 * points.
 */
import { readFileSync } from "node:fs";

import { z } from "zod";

import { isColumnName } from "./columns.js";
import { RecipeError } from "./errors.js";

const label = z.string().min(1).max(80);

/** Guide lines document where their slope or level comes from. */
const provenance = z.string().min(1).max(200);

const axisSchema = z.strictObject({
  scale: z.enum(["linear", "log"]),
  label: label,
  // fixed data range; omitted means fit to the plotted points
  limits: z.tuple([z.number(), z.number()]).optional(),
});

const styleSchema = z.strictObject({
  stroke: z.string().regex(/^#[0-9a-f]{6}$/, "stroke must be a #rrggbb color"),
  dash: z
    .string()
    .regex(/^\d+(?: \d+)*$/, "dash must be space-separated lengths")
    .nullable()
    .default(null),
  marker: z.enum(["circle", "square", "diamond", "none"]).default("circle"),
  width: z.number().positive().default(1.6),
});

const filterValue = z.union([z.string(), z.number()]);

const seriesSchema = z.strictObject({
  label: label,
  /** Equality constraints on columns; rows must match all of them. */
  filter: z.record(z.string(), filterValue),
  x: z.string(),
  y: z.string(),
  yerr: z.string().optional(),
  /**
   * "line" joins the matched rows sorted by x.  "level" draws one
   * horizontal rule per matched row at that row's y value, for
   * reference levels that live in a CSV rather than in the recipe.
   */
  draw: z.enum(["line", "level"]).default("line"),
  style: styleSchema,
});

const inputSchema = z.strictObject({
  csv: z
    .string()
    .regex(/^[A-Za-z0-9._-]+\.csv$/, "csv must be a bare *.csv file name"),
  series: z.array(seriesSchema).min(1),
});

const anchorSchema = z.strictObject({ x: z.number(), y: z.number() });

const guideSchema = z.discriminatedUnion("kind", [
  // y(x) = anchor.y * (x / anchor.x)^slope, straight on log-log axes
  z.strictObject({
    kind: z.literal("powerlaw"),
    slope: z.number(),
    anchor: anchorSchema,
    label: label,
    provenance: provenance,
  }),
  // y(x) = anchor.y * base^(rate * (x - anchor.x)), straight on semilog-y
  z.strictObject({
    kind: z.literal("exponential"),
    base: z.number().positive(),
    rate: z.number(),
    anchor: anchorSchema,
    label: label,
    provenance: provenance,
  }),
  // fixed horizontal rule
  z.strictObject({
    kind: z.literal("level"),
    y: z.number(),
    label: label,
    provenance: provenance,
  }),
]);

export const figureRecipeSchema = z
  .strictObject({
    figure: z
      .string()
      .regex(/^[a-z0-9-]+$/, "figure id must be a lowercase slug"),
    title: label,
    output: z
      .string()
      .regex(/^[A-Za-z0-9._-]+\.svg$/, "output must be a bare *.svg file name"),
    axes: z.strictObject({ x: axisSchema, y: axisSchema }),
    inputs: z.array(inputSchema).min(1),
    guides: z.array(guideSchema).default([]),
  })
  .superRefine((recipe, ctx) => {
    recipe.inputs.forEach((input, i) => {
      input.series.forEach((series, j) => {
        const referenced = [
          ...Object.keys(series.filter),
          series.x,
          series.y,
          ...(series.yerr === undefined ? [] : [series.yerr]),
        ];
        for (const name of referenced) {
          if (!isColumnName(name)) {
            ctx.addIssue({
              code: "custom",
              path: ["inputs", i, "series", j],
              message: `references column not in the CSV schema: ${name}`,
            });
          }
        }
      });
    });
    recipe.guides.forEach((guide, i) => {
      if (guide.kind === "powerlaw" && recipe.axes.y.scale !== "log") {
        ctx.addIssue({
          code: "custom",
          path: ["guides", i],
          message: "powerlaw guide needs a log y axis",
        });
      }
      if (guide.kind === "powerlaw" && recipe.axes.x.scale !== "log") {
        ctx.addIssue({
          code: "custom",
          path: ["guides", i],
          message: "powerlaw guide needs a log x axis",
        });
      }
      if (guide.kind === "exponential" && recipe.axes.y.scale !== "log") {
        ctx.addIssue({
          code: "custom",
          path: ["guides", i],
          message: "exponential guide needs a log y axis",
        });
      }
    });
    const labels = [
      ...recipe.inputs.flatMap((input) => input.series.map((s) => s.label)),
      ...recipe.guides.map((g) => g.label),
    ];
    const seen = new Set<string>();
    for (const l of labels) {
      if (seen.has(l)) {
        ctx.addIssue({
          code: "custom",
          path: [],
          message: `duplicate legend label: ${l}`,
        });
      }
      seen.add(l);
    }
  });

export type FigureRecipe = z.infer<typeof figureRecipeSchema>;
export type SeriesSpec = z.infer<typeof seriesSchema>;
export type GuideSpec = z.infer<typeof guideSchema>;
export type AxisSpec = z.infer<typeof axisSchema>;

export function parseRecipe(raw: unknown, source: string): FigureRecipe {
  const result = figureRecipeSchema.safeParse(raw);
  if (!result.success) {
    const details = result.error.issues
      .map((issue) => {
        const where = issue.path.length ? issue.path.join(".") : "(root)";
        return `${where}: ${issue.message}`;
      })
      .join("; ");
    throw new RecipeError(`invalid recipe ${source}: ${details}`);
  }
  return result.data;
}

export function loadRecipe(path: string): FigureRecipe {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new RecipeError(`cannot read recipe file: ${path}`);
  }
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new RecipeError(`recipe ${path} is not valid JSON: ${String(err)}`);
  }
  return parseRecipe(raw, path);
}
