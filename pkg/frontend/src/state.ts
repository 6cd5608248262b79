/** Pure state transitions for the studio.
 *
 * The undo log is the source of truth: it records every committed draw
 * operation, and the visible stroke list is always the replay of that log.
 * Every transition returns a fresh state object.
 */

import type { CategoryPalette, GenerateSceneResponse, Point, Stroke } from "./types";

export interface StudioState {
  readonly palette: CategoryPalette;
  readonly strokes: Stroke[];
  readonly undoLog: Stroke[];
  readonly selectedCategory: string;
  readonly seedLocked: boolean;
  readonly lastSeed: number | null;
  readonly lastResponse: GenerateSceneResponse | null;
  readonly banner: string | null;
}

export function allCategories(palette: CategoryPalette): string[] {
  return [...palette.foreground, ...palette.background];
}

export function createState(palette: CategoryPalette): StudioState {
  const first = palette.foreground[0];
  if (first === undefined) {
    throw new Error("palette has no foreground categories");
  }
  return {
    palette,
    strokes: [],
    undoLog: [],
    selectedCategory: first,
    seedLocked: true, // locked by default so edit/regenerate comparisons are meaningful
    lastSeed: null,
    lastResponse: null,
    banner: null,
  };
}

function copyStroke(stroke: Stroke): Stroke {
  return {
    category: stroke.category,
    points: stroke.points.map((p): Point => [p[0], p[1]]),
  };
}

/** The stroke list is defined as the replay of the committed operations. */
export function replayUndoLog(log: readonly Stroke[]): Stroke[] {
  return log.map(copyStroke);
}

/** Appends a stroke tagged with the selected category; traces with fewer
 * than 2 points are degenerate and discarded. */
export function addStroke(state: StudioState, points: Point[]): StudioState {
  if (points.length < 2) {
    return state;
  }
  const undoLog = [
    ...state.undoLog,
    copyStroke({ points, category: state.selectedCategory }),
  ];
  return { ...state, undoLog, strokes: replayUndoLog(undoLog) };
}

export function undo(state: StudioState): StudioState {
  if (state.undoLog.length === 0) {
    return state;
  }
  const undoLog = state.undoLog.slice(0, -1);
  return { ...state, undoLog, strokes: replayUndoLog(undoLog) };
}

export function selectCategory(state: StudioState, category: string): StudioState {
  if (!allCategories(state.palette).includes(category)) {
    throw new Error(
      `unknown category "${category}"; palette: ${allCategories(state.palette).join(", ")}`,
    );
  }
  return { ...state, selectedCategory: category };
}

export function toggleSeedLock(state: StudioState): StudioState {
  return { ...state, seedLocked: !state.seedLocked };
}

export function applyResponse(
  state: StudioState,
  response: GenerateSceneResponse,
): StudioState {
  return { ...state, lastResponse: response, lastSeed: response.seed, banner: null };
}

export function showBanner(state: StudioState, message: string): StudioState {
  return { ...state, banner: message };
}

export function dismissBanner(state: StudioState): StudioState {
  return { ...state, banner: null };
}
