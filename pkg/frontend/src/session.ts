/** Request construction and replayable session files.
 *
 * A session file carries exactly what buildRequest needs, so loading one
 * and converting it back yields the identical request payload.
 */

import { z } from "zod";
import { replayUndoLog, type StudioState } from "./state";
import type { GenerateSceneRequest, Point } from "./types";

export const SESSION_VERSION = 1 as const;

export interface SessionFile {
  version: typeof SESSION_VERSION;
  strokes: GenerateSceneRequest["strokes"];
  canvasSize: number;
  seed: number | null;
  seedLocked: boolean;
}

const sessionFileSchema = z.object({
  version: z.literal(SESSION_VERSION),
  strokes: z.array(
    z.object({
      points: z.array(z.tuple([z.number(), z.number()])).min(2),
      category: z.string().min(1),
    }),
  ),
  canvasSize: z.number().int().positive(),
  seed: z.number().int().nonnegative().nullable(),
  seedLocked: z.boolean(),
});

/** The next /generate/scene payload for this state. With the seed lock on,
 * the previous response's seed is reused so the user sees only the effect
 * of their stroke edits; otherwise the server picks a fresh seed. */
export function buildRequest(state: StudioState, canvasSize: number): GenerateSceneRequest {
  return {
    strokes: replayUndoLog(state.undoLog),
    canvas_size: canvasSize,
    seed: state.seedLocked ? state.lastSeed : null,
  };
}

export function exportSession(state: StudioState, canvasSize: number): SessionFile {
  return {
    version: SESSION_VERSION,
    strokes: replayUndoLog(state.undoLog),
    canvasSize,
    seed: state.seedLocked ? state.lastSeed : null,
    seedLocked: state.seedLocked,
  };
}

export function sessionToRequest(file: SessionFile): GenerateSceneRequest {
  return {
    strokes: file.strokes.map((stroke) => ({
      category: stroke.category,
      points: stroke.points.map((p): Point => [p[0], p[1]]),
    })),
    canvas_size: file.canvasSize,
    seed: file.seed,
  };
}

export function serializeSession(file: SessionFile): string {
  return JSON.stringify(file, null, 2);
}

export function parseSession(text: string): SessionFile {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new Error(`session file is not valid JSON: ${String(err)}`);
  }
  const parsed = sessionFileSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new Error(
      `not a session file: ${issue ? `${issue.path.join(".")}: ${issue.message}` : "unknown"}`,
    );
  }
  return parsed.data;
}
