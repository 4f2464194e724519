import { readdirSync, readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { RecipeError } from "../src/errors.js";
import { loadRecipe, parseRecipe } from "../src/recipe.js";

const recipesDir = fileURLToPath(new URL("../recipes/", import.meta.url));

function minimalRecipe(): Record<string, unknown> {
  return {
    figure: "smoke",
    title: "Smoke",
    output: "smoke.svg",
    axes: {
      x: { scale: "linear", label: "x" },
      y: { scale: "log", label: "y" },
    },
    inputs: [
      {
        csv: "design_decay.csv",
        series: [
          {
            label: "one",
            filter: { metric: "delta_mean", t: 2 },
            x: "n_b",
            y: "value",
            style: { stroke: "#1b6ca8" },
          },
        ],
      },
    ],
  };
}

describe("recipe schema", () => {
  it("parses a minimal recipe and fills style defaults", () => {
    const recipe = parseRecipe(minimalRecipe(), "inline");
    const series = recipe.inputs[0]!.series[0]!;
    expect(series.style.dash).toBeNull();
    expect(series.style.marker).toBe("circle");
    expect(series.draw).toBe("line");
    expect(recipe.guides).toEqual([]);
  });

  it("rejects a filter on a column outside the CSV schema", () => {
    const raw = minimalRecipe();
    (raw.inputs as any)[0].series[0].filter = { wavelength: 5 };
    expect(() => parseRecipe(raw, "inline")).toThrow(
      /references column not in the CSV schema: wavelength/,
    );
  });

  it("rejects an x column outside the CSV schema", () => {
    const raw = minimalRecipe();
    (raw.inputs as any)[0].series[0].x = "n_c";
    expect(() => parseRecipe(raw, "inline")).toThrow(RecipeError);
  });

  it("rejects unknown axis scales", () => {
    const raw = minimalRecipe();
    (raw.axes as any).y.scale = "sqrt";
    expect(() => parseRecipe(raw, "inline")).toThrow(RecipeError);
  });

  it("rejects output names with path separators", () => {
    const raw = minimalRecipe();
    raw.output = "../evil.svg";
    expect(() => parseRecipe(raw, "inline")).toThrow(RecipeError);
  });

  it("rejects guides without a provenance note", () => {
    const raw = minimalRecipe();
    raw.guides = [
      { kind: "level", y: 1.0, label: "floor", provenance: "" },
    ];
    expect(() => parseRecipe(raw, "inline")).toThrow(RecipeError);
  });

  it("rejects a powerlaw guide on a linear x axis", () => {
    const raw = minimalRecipe();
    raw.guides = [
      {
        kind: "powerlaw",
        slope: -2,
        anchor: { x: 1, y: 1 },
        label: "g",
        provenance: "measured",
      },
    ];
    expect(() => parseRecipe(raw, "inline")).toThrow(
      /powerlaw guide needs a log x axis/,
    );
  });

  it("rejects duplicate legend labels", () => {
    const raw = minimalRecipe();
    const series = (raw.inputs as any)[0].series;
    series.push(JSON.parse(JSON.stringify(series[0])));
    expect(() => parseRecipe(raw, "inline")).toThrow(/duplicate legend label/);
  });

  it("reports unreadable recipe files as recipe errors", () => {
    expect(() => loadRecipe("/nonexistent/recipe.json")).toThrow(RecipeError);
  });
});

describe("checked-in recipes", () => {
  const names = readdirSync(recipesDir).filter((n) => n.endsWith(".json"));

  it("ships one recipe per figure analogue", () => {
    expect(names.length).toBeGreaterThanOrEqual(8);
  });

  it.each(names)("%s passes the schema", (name) => {
    const recipe = loadRecipe(recipesDir + name);
    expect(recipe.figure).toMatch(/^[a-z0-9-]+$/);
  });

  it.each(names)("%s annotates every guide line with its provenance", (name) => {
    const recipe = loadRecipe(recipesDir + name);
    for (const guide of recipe.guides) {
      expect(guide.provenance.length).toBeGreaterThan(0);
      expect(guide.provenance).toMatch(/^\[[A-Z]+\]/);
    }
  });

  it("keeps figure ids and output names unique across the set", () => {
    const ids = names.map((n) => loadRecipe(recipesDir + n).figure);
    expect(new Set(ids).size).toBe(ids.length);
    const outputs = names.map((n) => loadRecipe(recipesDir + n).output);
    expect(new Set(outputs).size).toBe(outputs.length);
  });

  it("raw recipe text never smuggles numeric data columns", () => {
    // recipes carry style and guide parameters only; a data array would
    // defeat the pure CSV -> image contract
    for (const name of names) {
      const raw = JSON.parse(readFileSync(recipesDir + name, "utf8"));
      for (const input of raw.inputs) {
        for (const series of input.series) {
          expect(series).not.toHaveProperty("points");
          expect(series).not.toHaveProperty("data");
        }
      }
    }
  });
});
