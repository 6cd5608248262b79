/** Turning studio state into canvas draw operations. */

import { categoryColor } from "./colors";
import { allCategories, type StudioState } from "./state";
import type { Stroke } from "./types";

export interface DrawOp {
  stroke: Stroke;
  color: string;
}

/** Strokes in insertion order, each with its category display color. */
export function strokeDrawOps(state: StudioState): DrawOp[] {
  const palette = allCategories(state.palette);
  return state.strokes.map((stroke) => ({
    stroke,
    color: categoryColor(palette.indexOf(stroke.category)),
  }));
}

/** The slice of CanvasRenderingContext2D the painter needs. */
export interface StrokeSurface {
  // Matches CanvasRenderingContext2D; we only ever assign color strings.
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
}

export function paintStrokes(state: StudioState, ctx: StrokeSurface, lineWidth = 2): void {
  for (const op of strokeDrawOps(state)) {
    const [first, ...rest] = op.stroke.points;
    if (first === undefined) {
      continue;
    }
    ctx.strokeStyle = op.color;
    ctx.lineWidth = lineWidth;
    ctx.beginPath();
    ctx.moveTo(first[0], first[1]);
    for (const point of rest) {
      ctx.lineTo(point[0], point[1]);
    }
    ctx.stroke();
  }
}
