#!/usr/bin/env node
/**
 * Command line entry point.
 *
 * Exit codes: 0 drawn, 2 bad recipe or usage, 3 empty input CSV,
 * 4 data that does not match the recipe, 1 anything unexpected.
 */
import process from "node:process";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { RenderFailure } from "./errors.js";
import { renderRecipeFile } from "./render.js";

export async function main(argv: readonly string[]): Promise<number> {
  let exitCode = 0;
  const report = (err: unknown, usageMessage?: string): void => {
    if (err instanceof RenderFailure) {
      process.stderr.write(`error: ${err.message}\n`);
      exitCode = err.exitCode;
    } else if (err !== undefined && err !== null) {
      process.stderr.write(`error: ${String(err)}\n`);
      exitCode = 1;
    } else {
      process.stderr.write(`error: ${usageMessage ?? "unknown failure"}\n`);
      exitCode = 2;
    }
  };
  const parser = yargs(hideBin([...argv]))
    .scriptName("design-figures")
    .command(
      "render",
      "draw figure SVGs from experiment CSV files",
      (cmd) =>
        cmd
          .option("recipe", {
            type: "string",
            array: true,
            demandOption: true,
            describe: "recipe JSON file, repeatable for a batch",
          })
          .option("data", {
            type: "string",
            demandOption: true,
            describe: "directory holding the input CSV files",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "directory the SVGs are written to",
          }),
      (args) => {
        // batch stays sequential in this one process on purpose
        for (const recipePath of args.recipe) {
          const result = renderRecipeFile(recipePath, args.data, args.out);
          process.stdout.write(`wrote ${result.outPath}\n`);
        }
      },
    )
    .demandCommand(1, "pick a command, e.g. render")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      report(err, msg ?? undefined);
    });
  try {
    await parser.parseAsync();
  } catch (err) {
    // escaped the fail handler (or was rethrown by it); keep the first verdict
    if (exitCode === 0) {
      report(err);
    }
  }
  return exitCode;
}

const invoked = process.argv[1];
if (invoked !== undefined && /cli\.[cm]?js$/.test(invoked)) {
  main(process.argv)
    .then((code) => {
      process.exitCode = code;
    })
    .catch((err: unknown) => {
      process.stderr.write(`error: ${String(err)}\n`);
      process.exitCode = 1;
    });
}
