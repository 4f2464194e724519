import { spawnSync } from "node:child_process";
import {
  existsSync,
  mkdtempSync,
  readdirSync,
  readFileSync,
  writeFileSync,
} from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

const cliPath = fileURLToPath(new URL("../dist/cli.js", import.meta.url));
const fixtures = fileURLToPath(new URL("./fixtures/", import.meta.url));
const recipesDir = fileURLToPath(new URL("../recipes/", import.meta.url));
const recipePaths = readdirSync(recipesDir)
  .filter((n) => n.endsWith(".json"))
  .map((n) => join(recipesDir, n));

function run(args: string[]): {
  status: number | null;
  stdout: string;
  stderr: string;
} {
  const result = spawnSync(process.execPath, [cliPath, ...args], {
    encoding: "utf8",
  });
  return { status: result.status, stdout: result.stdout, stderr: result.stderr };
}

describe("the render command", () => {
  it("draws the whole recipe set in one batch", () => {
    const outDir = mkdtempSync(join(tmpdir(), "cli-out-"));
    const args = ["render", "--data", fixtures, "--out", outDir];
    for (const p of recipePaths) {
      args.push("--recipe", p);
    }
    const result = run(args);
    expect(result.stderr).toBe("");
    expect(result.status).toBe(0);
    const wrote = result.stdout.trim().split("\n");
    expect(wrote.length).toBe(recipePaths.length);
    for (const line of wrote) {
      expect(line.startsWith("wrote ")).toBe(true);
      expect(existsSync(line.slice("wrote ".length))).toBe(true);
    }
  });

  it("writes the same bytes on a rerun", () => {
    const recipe = recipePaths.find((p) => p.endsWith("fig5_relaxation.json"))!;
    const out1 = mkdtempSync(join(tmpdir(), "cli-a-"));
    const out2 = mkdtempSync(join(tmpdir(), "cli-b-"));
    expect(run(["render", "--recipe", recipe, "--data", fixtures, "--out", out1]).status).toBe(0);
    expect(run(["render", "--recipe", recipe, "--data", fixtures, "--out", out2]).status).toBe(0);
    const a = readFileSync(join(out1, "fig5_relaxation.svg"), "utf8");
    const b = readFileSync(join(out2, "fig5_relaxation.svg"), "utf8");
    expect(b).toBe(a);
  });

  it("exits nonzero with a message on an empty CSV", () => {
    const dataDir = mkdtempSync(join(tmpdir(), "cli-empty-"));
    writeFileSync(join(dataDir, "design_decay.csv"), "");
    const recipe = recipePaths.find((p) => p.endsWith("fig2_design_decay.json"))!;
    const result = run([
      "render",
      "--recipe", recipe,
      "--data", dataDir,
      "--out", mkdtempSync(join(tmpdir(), "cli-empty-out-")),
    ]);
    expect(result.status).toBe(3);
    expect(result.stderr).toMatch(/empty CSV/);
  });

  it("diagnoses missing columns with exit code 4", () => {
    const dataDir = mkdtempSync(join(tmpdir(), "cli-short-"));
    writeFileSync(join(dataDir, "design_decay.csv"), "metric,value\ndelta_mean,1\n");
    const recipe = recipePaths.find((p) => p.endsWith("fig2_design_decay.json"))!;
    const result = run([
      "render",
      "--recipe", recipe,
      "--data", dataDir,
      "--out", mkdtempSync(join(tmpdir(), "cli-short-out-")),
    ]);
    expect(result.status).toBe(4);
    expect(result.stderr).toMatch(/schema mismatch/);
    expect(result.stderr).toMatch(/missing columns/);
  });

  it("rejects a broken recipe file with exit code 2", () => {
    const recipe = join(mkdtempSync(join(tmpdir(), "cli-bad-")), "bad.json");
    writeFileSync(recipe, "{ not json");
    const result = run([
      "render",
      "--recipe", recipe,
      "--data", fixtures,
      "--out", mkdtempSync(join(tmpdir(), "cli-bad-out-")),
    ]);
    expect(result.status).toBe(2);
    expect(result.stderr).toMatch(/error: /);
  });

  it("rejects unknown flags and missing commands with exit code 2", () => {
    expect(run(["render", "--bogus"]).status).toBe(2);
    expect(run([]).status).toBe(2);
  });
});
