import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { loadTable } from "../src/csv.js";
import { DataError } from "../src/errors.js";
import { parseRecipe, type SeriesSpec } from "../src/recipe.js";
import { selectSeries } from "../src/series.js";

const fixtures = fileURLToPath(new URL("./fixtures/", import.meta.url));

function spec(overrides: Partial<Record<string, unknown>>): SeriesSpec {
  // run through the schema so defaults land exactly as in real recipes
  const recipe = parseRecipe(
    {
      figure: "probe",
      title: "Probe",
      output: "probe.svg",
      axes: {
        x: { scale: "linear", label: "x" },
        y: { scale: "linear", label: "y" },
      },
      inputs: [
        {
          csv: "design_decay.csv",
          series: [
            {
              label: "probe",
              filter: { metric: "delta_mean" },
              x: "n_b",
              y: "value",
              style: { stroke: "#1b6ca8" },
              ...overrides,
            },
          ],
        },
      ],
    },
    "inline",
  );
  return recipe.inputs[0]!.series[0]!;
}

describe("selectSeries", () => {
  const table = loadTable(join(fixtures, "design_decay.csv"));

  it("filters on strings and numbers and sorts by x", () => {
    const series = selectSeries(
      table,
      spec({
        filter: {
          metric: "delta_mean",
          sector: "translation",
          sector_param: "k=0",
          t: 2,
        },
        yerr: "stderr",
      }),
    );
    expect(series.points.map((p) => p.x)).toEqual([4, 5, 6]);
    for (const p of series.points) {
      expect(p.y).toBeGreaterThan(0);
      expect(p.yerr).toBeGreaterThan(0);
    }
  });

  it("matches numeric filters against string cells", () => {
    const viaNumber = selectSeries(
      table,
      spec({ filter: { metric: "delta_mean", sector: "haar", t: 3 } }),
    );
    const viaString = selectSeries(
      table,
      spec({ filter: { metric: "delta_mean", sector: "haar", t: "3" } }),
    );
    expect(viaNumber.points).toEqual(viaString.points);
  });

  it("reports an unmatched filter with the series label", () => {
    expect(() =>
      selectSeries(table, spec({ filter: { metric: "delta_mean", t: 99 } })),
    ).toThrow(/no rows .* match .*"t":99.* for series "probe"/);
  });

  it("reports blank cells instead of plotting garbage", () => {
    // tau is never populated by design-scan rows
    expect(() =>
      selectSeries(table, spec({ filter: { metric: "delta_mean" }, x: "tau" })),
    ).toThrow(DataError);
    expect(() =>
      selectSeries(table, spec({ filter: { metric: "delta_mean" }, x: "tau" })),
    ).toThrow(/column tau is blank/);
  });

  it("level series take one point per matched row and ignore x", () => {
    const series = selectSeries(
      table,
      spec({
        filter: { metric: "delta_mean", sector: "haar", t: 1 },
        draw: "level",
      }),
    );
    expect(series.draw).toBe("level");
    expect(series.points.length).toBe(3);
    for (const p of series.points) {
      expect(p.x).toBe(0);
    }
  });
});
