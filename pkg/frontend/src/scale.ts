/** Linear and logarithmic axis scales with tick generation. */
import { DataError } from "./errors.js";

export interface Tick {
  value: number;
  label: string;
}

export interface Scale {
  /** data value -> pixel coordinate */
  readonly pos: (value: number) => number;
  readonly ticks: readonly Tick[];
  readonly domain: readonly [number, number];
}

/** Compact deterministic number label: no trailing zeros, e-notation far from 1. */
export function formatTick(value: number): string {
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    const exponent = Math.floor(Math.log10(magnitude));
    const mantissa = value / 10 ** exponent;
    const head = Number(mantissa.toPrecision(3));
    return head === 1
      ? `1e${exponent}`
      : `${head}e${exponent}`;
  }
  return String(Number(value.toPrecision(6)));
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const power = 10 ** Math.floor(Math.log10(raw));
  for (const mult of [1, 2, 5]) {
    if (mult * power >= raw) {
      return mult * power;
    }
  }
  return 10 * power;
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [lo, hi] = domain;
  if (!(hi > lo)) {
    throw new DataError(`degenerate linear axis domain [${lo}, ${hi}]`);
  }
  const [r0, r1] = range;
  const pos = (v: number): number => r0 + ((v - lo) / (hi - lo)) * (r1 - r0);
  const step = niceStep(hi - lo, 6);
  const ticks: Tick[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    const rounded = Math.abs(v) < 1e-12 * step ? 0 : v;
    ticks.push({ value: rounded, label: formatTick(rounded) });
  }
  return { pos, ticks, domain };
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [lo, hi] = domain;
  if (!(lo > 0) || !(hi > lo)) {
    throw new DataError(
      `log axis needs a positive increasing domain, got [${lo}, ${hi}]`,
    );
  }
  const [r0, r1] = range;
  const logLo = Math.log10(lo);
  const logHi = Math.log10(hi);
  const pos = (v: number): number =>
    r0 + ((Math.log10(v) - logLo) / (logHi - logLo)) * (r1 - r0);
  const ticks: Tick[] = [];
  const firstDecade = Math.ceil(logLo - 1e-9);
  const lastDecade = Math.floor(logHi + 1e-9);
  // fewer than two decade marks reads badly; pad with 2x and 5x mantissas
  const mantissas = lastDecade - firstDecade < 2 ? [1, 2, 5] : [1];
  for (let d = Math.floor(logLo) - 1; d <= lastDecade + 1; d += 1) {
    for (const m of mantissas) {
      const v = m * 10 ** d;
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) {
        ticks.push({ value: v, label: formatTick(v) });
      }
    }
  }
  ticks.sort((a, b) => a.value - b.value);
  return { pos, ticks, domain };
}

export function makeScale(
  kind: "linear" | "log",
  domain: [number, number],
  range: [number, number],
): Scale {
  return kind === "log" ? logScale(domain, range) : linearScale(domain, range);
}
