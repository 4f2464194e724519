import { describe, expect, it } from "vitest";

import { DataError } from "../src/errors.js";
import { formatTick, linearScale, logScale } from "../src/scale.js";

describe("linearScale", () => {
  it("maps the domain ends onto the range ends", () => {
    const scale = linearScale([0, 10], [100, 500]);
    expect(scale.pos(0)).toBeCloseTo(100);
    expect(scale.pos(10)).toBeCloseTo(500);
    expect(scale.pos(5)).toBeCloseTo(300);
  });

  it("supports inverted ranges for screen-y axes", () => {
    const scale = linearScale([0, 1], [400, 40]);
    expect(scale.pos(0)).toBeCloseTo(400);
    expect(scale.pos(1)).toBeCloseTo(40);
  });

  it("keeps ticks inside the domain at a round step", () => {
    const scale = linearScale([3.2, 11.4], [0, 1]);
    const values = scale.ticks.map((t) => t.value);
    expect(values.length).toBeGreaterThanOrEqual(3);
    expect(Math.min(...values)).toBeGreaterThanOrEqual(3.2);
    expect(Math.max(...values)).toBeLessThanOrEqual(11.4);
    const steps = values.slice(1).map((v, i) => v - values[i]!);
    for (const s of steps) {
      expect(s).toBeCloseTo(steps[0]!, 9);
    }
  });

  it("rejects an empty domain", () => {
    expect(() => linearScale([2, 2], [0, 1])).toThrow(DataError);
  });
});

describe("logScale", () => {
  it("is linear in the exponent", () => {
    const scale = logScale([0.01, 100], [0, 400]);
    expect(scale.pos(0.01)).toBeCloseTo(0);
    expect(scale.pos(100)).toBeCloseTo(400);
    expect(scale.pos(1)).toBeCloseTo(200);
  });

  it("emits decade ticks over wide domains", () => {
    const scale = logScale([0.005, 50], [0, 1]);
    const labels = scale.ticks.map((t) => t.label);
    expect(labels).toContain("0.01");
    expect(labels).toContain("1");
    expect(labels).toContain("10");
  });

  it("fills in 2x and 5x mantissas on narrow domains", () => {
    const scale = logScale([0.8, 9], [0, 1]);
    const values = scale.ticks.map((t) => t.value);
    expect(values).toContain(1);
    expect(values).toContain(2);
    expect(values).toContain(5);
  });

  it("rejects nonpositive domains", () => {
    expect(() => logScale([0, 1], [0, 1])).toThrow(DataError);
    expect(() => logScale([-1, 1], [0, 1])).toThrow(DataError);
  });
});

describe("formatTick", () => {
  it("prints plain numbers near one and e-notation far out", () => {
    expect(formatTick(0)).toBe("0");
    expect(formatTick(100)).toBe("100");
    expect(formatTick(0.25)).toBe("0.25");
    expect(formatTick(0.001)).toBe("0.001");
    expect(formatTick(0.0001)).toBe("1e-4");
    expect(formatTick(20000)).toBe("2e4");
  });
});
