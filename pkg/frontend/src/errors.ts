/** Typed failures with the exit code the CLI maps them to. */

export class RenderFailure extends Error {
  readonly exitCode: number;

  constructor(message: string, exitCode: number) {
    super(message);
    this.name = new.target.name;
    this.exitCode = exitCode;
  }
}

/** Recipe file unreadable, malformed, or violating the recipe schema. */
export class RecipeError extends RenderFailure {
  constructor(message: string) {
    super(message, 2);
  }
}

/** Input CSV has no data rows at all. */
export class EmptyCsvError extends RenderFailure {
  constructor(path: string) {
    super(`empty CSV: ${path} has no data rows`, 3);
  }
}

/**
 * Input data does not line up with what the recipe asks for: file
 * missing, header deviates from the column contract, a filter matches
 * nothing, or a referenced cell is blank.
 */
export class DataError extends RenderFailure {
  constructor(message: string) {
    super(message, 4);
  }
}
