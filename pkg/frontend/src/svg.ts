/**
 * Pure SVG assembly.  Everything here maps already-extracted numbers to
 * fixed-style markup; no statistics or physics happens in this module.
 */
import { DataError } from "./errors.js";
import { type FigureRecipe, type GuideSpec } from "./recipe.js";
import { formatTick, makeScale, type Scale } from "./scale.js";
import { type Series } from "./series.js";

export const WIDTH = 760;
export const HEIGHT = 500;
const MARGIN = { left: 72, right: 20, top: 42, bottom: 56 } as const;
const PLOT = {
  x0: MARGIN.left,
  x1: WIDTH - MARGIN.right,
  y0: HEIGHT - MARGIN.bottom,
  y1: MARGIN.top,
} as const;

const GUIDE_COLOR = "#666666";
const GUIDE_DASH = "6 4";

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function px(v: number): string {
  return v.toFixed(2);
}

interface Span {
  lo: number;
  hi: number;
}

function growSpan(span: Span | undefined, value: number): Span {
  if (span === undefined) {
    return { lo: value, hi: value };
  }
  return { lo: Math.min(span.lo, value), hi: Math.max(span.hi, value) };
}

function padSpan(span: Span, logScale: boolean): [number, number] {
  if (logScale) {
    const ratio = span.hi / span.lo;
    const factor = ratio > 1 ? ratio ** 0.05 : 2;
    return [span.lo / factor, span.hi * factor];
  }
  const width = span.hi - span.lo;
  const pad = width > 0 ? 0.04 * width : Math.max(1, Math.abs(span.hi)) * 0.5;
  return [span.lo - pad, span.hi + pad];
}

export interface FigureGeometry {
  xScale: Scale;
  yScale: Scale;
  diagnostics: string[];
  series: Series[];
}

/**
 * Drop points a log axis cannot show and work out both axis domains.
 * Dropped points are reported in the returned diagnostics so they end
 * up visible in the SVG rather than silently vanishing.
 */
export function layoutFigure(
  recipe: FigureRecipe,
  series: Series[],
): FigureGeometry {
  const xLog = recipe.axes.x.scale === "log";
  const yLog = recipe.axes.y.scale === "log";
  const diagnostics: string[] = [];
  let xSpan: Span | undefined;
  let ySpan: Span | undefined;

  const kept = series.map((s): Series => {
    const visible = s.points.filter((p) => {
      if (yLog && p.y <= 0) {
        return false;
      }
      if (xLog && s.draw === "line" && p.x <= 0) {
        return false;
      }
      return true;
    });
    const dropped = s.points.length - visible.length;
    if (dropped > 0) {
      diagnostics.push(
        `dropped ${dropped} point${dropped === 1 ? "" : "s"} of series ` +
          `"${s.label}" not representable on a log axis`,
      );
    }
    if (visible.length === 0) {
      throw new DataError(
        `series "${s.label}" has no points representable on the chosen axes`,
      );
    }
    for (const p of visible) {
      ySpan = growSpan(ySpan, p.y);
      if (p.yerr !== undefined) {
        ySpan = growSpan(ySpan, p.y + p.yerr);
        const below = p.y - p.yerr;
        if (!yLog || below > 0) {
          ySpan = growSpan(ySpan, below);
        }
      }
      if (s.draw === "line") {
        xSpan = growSpan(xSpan, p.x);
      }
    }
    return { ...s, points: visible };
  });

  for (const guide of recipe.guides) {
    if (guide.kind === "level") {
      ySpan = growSpan(ySpan, guide.y);
    } else {
      xSpan = growSpan(xSpan, guide.anchor.x);
      ySpan = growSpan(ySpan, guide.anchor.y);
    }
  }

  if (xSpan === undefined || ySpan === undefined) {
    throw new DataError("nothing to plot: no line series and no guides");
  }

  const xDomain = recipe.axes.x.limits ?? padSpan(xSpan, xLog);
  const yDomain = recipe.axes.y.limits ?? padSpan(ySpan, yLog);
  const xScale = makeScale(recipe.axes.x.scale, [xDomain[0], xDomain[1]], [
    PLOT.x0,
    PLOT.x1,
  ]);
  const yScale = makeScale(recipe.axes.y.scale, [yDomain[0], yDomain[1]], [
    PLOT.y0,
    PLOT.y1,
  ]);
  return { xScale, yScale, diagnostics, series: kept };
}

function markerFragment(
  marker: "circle" | "square" | "diamond" | "none",
  cx: number,
  cy: number,
  color: string,
): string {
  const r = 3;
  switch (marker) {
    case "none":
      return "";
    case "circle":
      return `<circle cx="${px(cx)}" cy="${px(cy)}" r="${r}" fill="${color}"/>`;
    case "square":
      return (
        `<rect x="${px(cx - r)}" y="${px(cy - r)}" width="${2 * r}" ` +
        `height="${2 * r}" fill="${color}"/>`
      );
    case "diamond":
      return (
        `<path d="M ${px(cx)} ${px(cy - r - 1)} L ${px(cx + r + 1)} ${px(cy)} ` +
        `L ${px(cx)} ${px(cy + r + 1)} L ${px(cx - r - 1)} ${px(cy)} Z" ` +
        `fill="${color}"/>`
      );
  }
}

function seriesFragment(s: Series, xScale: Scale, yScale: Scale): string {
  const parts: string[] = [];
  const dashAttr = s.style.dash === null ? "" : ` stroke-dasharray="${s.style.dash}"`;
  if (s.draw === "level") {
    for (const p of s.points) {
      const y = px(yScale.pos(p.y));
      parts.push(
        `<line x1="${px(PLOT.x0)}" y1="${y}" x2="${px(PLOT.x1)}" y2="${y}" ` +
          `stroke="${s.style.stroke}" stroke-width="${s.style.width}"${dashAttr}/>`,
      );
    }
    return parts.join("\n");
  }
  for (const p of s.points) {
    if (p.yerr === undefined || p.yerr <= 0) {
      continue;
    }
    const cx = xScale.pos(p.x);
    const hiY = yScale.pos(p.y + p.yerr);
    const below = p.y - p.yerr;
    const loY =
      below > yScale.domain[0]
        ? yScale.pos(Math.max(below, yScale.domain[0]))
        : PLOT.y0;
    parts.push(
      `<line x1="${px(cx)}" y1="${px(loY)}" x2="${px(cx)}" y2="${px(hiY)}" ` +
        `stroke="${s.style.stroke}" stroke-width="1"/>`,
      `<line x1="${px(cx - 3)}" y1="${px(hiY)}" x2="${px(cx + 3)}" y2="${px(hiY)}" ` +
        `stroke="${s.style.stroke}" stroke-width="1"/>`,
    );
  }
  const coords = s.points
    .map((p) => `${px(xScale.pos(p.x))},${px(yScale.pos(p.y))}`)
    .join(" ");
  if (s.points.length > 1) {
    parts.push(
      `<polyline points="${coords}" fill="none" stroke="${s.style.stroke}" ` +
        `stroke-width="${s.style.width}"${dashAttr}/>`,
    );
  }
  for (const p of s.points) {
    parts.push(
      markerFragment(
        s.style.marker,
        xScale.pos(p.x),
        yScale.pos(p.y),
        s.style.stroke,
      ),
    );
  }
  return parts.join("\n");
}

function guidePath(
  guide: GuideSpec,
  xScale: Scale,
  yScale: Scale,
): string {
  if (guide.kind === "level") {
    const y = px(yScale.pos(guide.y));
    return (
      `<line x1="${px(PLOT.x0)}" y1="${y}" x2="${px(PLOT.x1)}" y2="${y}" ` +
      `stroke="${GUIDE_COLOR}" stroke-width="1.2" stroke-dasharray="${GUIDE_DASH}"/>`
    );
  }
  const [xLo, xHi] = xScale.domain;
  const evaluate = (x: number): number =>
    guide.kind === "powerlaw"
      ? guide.anchor.y * (x / guide.anchor.x) ** guide.slope
      : guide.anchor.y * guide.base ** (guide.rate * (x - guide.anchor.x));
  const steps = 32;
  const coords: string[] = [];
  for (let i = 0; i <= steps; i += 1) {
    const x =
      guide.kind === "powerlaw"
        ? xLo * (xHi / xLo) ** (i / steps)
        : xLo + ((xHi - xLo) * i) / steps;
    const y = evaluate(x);
    if (y <= 0) {
      continue;
    }
    coords.push(`${px(xScale.pos(x))},${px(yScale.pos(y))}`);
  }
  return (
    `<polyline points="${coords.join(" ")}" fill="none" ` +
    `stroke="${GUIDE_COLOR}" stroke-width="1.2" stroke-dasharray="${GUIDE_DASH}" ` +
    `clip-path="url(#plot-clip)"/>`
  );
}

function axesFragment(recipe: FigureRecipe, xScale: Scale, yScale: Scale): string {
  const parts: string[] = [];
  for (const tick of yScale.ticks) {
    const y = px(yScale.pos(tick.value));
    parts.push(
      `<line x1="${px(PLOT.x0)}" y1="${y}" x2="${px(PLOT.x1)}" y2="${y}" ` +
        `stroke="#e6e6e6" stroke-width="0.7"/>`,
      `<line x1="${px(PLOT.x0 - 5)}" y1="${y}" x2="${px(PLOT.x0)}" y2="${y}" ` +
        `stroke="#333333" stroke-width="1"/>`,
      `<text x="${px(PLOT.x0 - 8)}" y="${y}" font-size="10" fill="#333333" ` +
        `text-anchor="end" dominant-baseline="middle">${esc(tick.label)}</text>`,
    );
  }
  for (const tick of xScale.ticks) {
    const x = px(xScale.pos(tick.value));
    parts.push(
      `<line x1="${x}" y1="${px(PLOT.y0)}" x2="${x}" y2="${px(PLOT.y0 + 5)}" ` +
        `stroke="#333333" stroke-width="1"/>`,
      `<text x="${x}" y="${px(PLOT.y0 + 18)}" font-size="10" fill="#333333" ` +
        `text-anchor="middle">${esc(tick.label)}</text>`,
    );
  }
  parts.push(
    `<rect x="${px(PLOT.x0)}" y="${px(PLOT.y1)}" width="${px(PLOT.x1 - PLOT.x0)}" ` +
      `height="${px(PLOT.y0 - PLOT.y1)}" fill="none" stroke="#333333" stroke-width="1"/>`,
    `<text x="${px((PLOT.x0 + PLOT.x1) / 2)}" y="${px(HEIGHT - 14)}" font-size="12" ` +
      `fill="#111111" text-anchor="middle">${esc(recipe.axes.x.label)}</text>`,
    `<text x="18" y="${px((PLOT.y0 + PLOT.y1) / 2)}" font-size="12" fill="#111111" ` +
      `text-anchor="middle" transform="rotate(-90 18 ${px((PLOT.y0 + PLOT.y1) / 2)})">` +
      `${esc(recipe.axes.y.label)}</text>`,
    `<text x="${px(WIDTH / 2)}" y="24" font-size="15" fill="#111111" ` +
      `text-anchor="middle">${esc(recipe.title)}</text>`,
  );
  return parts.join("\n");
}

function legendFragment(series: Series[], guides: readonly GuideSpec[]): string {
  const entries: { label: string; color: string; dash: string | null }[] = [
    ...series.map((s) => ({
      label: s.label,
      color: s.style.stroke,
      dash: s.style.dash,
    })),
    ...guides.map((g) => ({ label: g.label, color: GUIDE_COLOR, dash: GUIDE_DASH })),
  ];
  const rowHeight = 15;
  const x = PLOT.x1 - 182;
  const y = PLOT.y1 + 10;
  const parts = [
    `<rect x="${px(x - 8)}" y="${px(y - 12)}" width="190" ` +
      `height="${px(entries.length * rowHeight + 8)}" fill="#ffffff" ` +
      `fill-opacity="0.85" stroke="#cccccc" stroke-width="0.7"/>`,
  ];
  entries.forEach((entry, i) => {
    const rowY = y + i * rowHeight;
    const dashAttr = entry.dash === null ? "" : ` stroke-dasharray="${entry.dash}"`;
    parts.push(
      `<line x1="${px(x)}" y1="${px(rowY - 3)}" x2="${px(x + 26)}" y2="${px(rowY - 3)}" ` +
        `stroke="${entry.color}" stroke-width="2"${dashAttr}/>`,
      `<text x="${px(x + 32)}" y="${px(rowY)}" font-size="11" fill="#111111">` +
        `${esc(entry.label)}</text>`,
    );
  });
  return parts.join("\n");
}

/** Assemble the complete SVG document for a recipe and its series. */
export function buildFigure(recipe: FigureRecipe, series: Series[]): string {
  const { xScale, yScale, diagnostics, series: visible } = layoutFigure(
    recipe,
    series,
  );
  const body = [
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<defs><clipPath id="plot-clip"><rect x="${px(PLOT.x0)}" y="${px(PLOT.y1)}" ` +
      `width="${px(PLOT.x1 - PLOT.x0)}" height="${px(PLOT.y0 - PLOT.y1)}"/>` +
      `</clipPath></defs>`,
    axesFragment(recipe, xScale, yScale),
    ...recipe.guides.map((g) => guidePath(g, xScale, yScale)),
    `<g clip-path="url(#plot-clip)">`,
    ...visible.map((s) => seriesFragment(s, xScale, yScale)),
    `</g>`,
    legendFragment(visible, recipe.guides),
    ...diagnostics.map((d) => `<!-- diagnostic: ${esc(d)} -->`),
  ];
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n${body.join("\n")}\n</svg>\n`
  );
}
