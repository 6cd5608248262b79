/** Export artifacts: the final scene PNG and a replayable session file. */

import { serializeSession, type SessionFile } from "./session";
import type { StudioState } from "./state";

export interface ExportFile {
  filename: string;
  mimeType: string;
  /** PNG bytes are base64; the session file is plain JSON text. */
  content: string;
  encoding: "base64" | "utf-8";
}

/** The two files a scene export produces. Requires a completed generation. */
export function exportFiles(state: StudioState, session: SessionFile): ExportFile[] {
  if (state.lastResponse === null) {
    throw new Error("nothing to export: no scene has been generated yet");
  }
  return [
    {
      filename: "scene.png",
      mimeType: "image/png",
      content: state.lastResponse.final_png,
      encoding: "base64",
    },
    {
      filename: "session.json",
      mimeType: "application/json",
      content: serializeSession(session),
      encoding: "utf-8",
    },
  ];
}

/** Browser-only glue: turn export files into anchor-click downloads. */
export function triggerDownloads(files: ExportFile[], doc: Document = document): void {
  for (const file of files) {
    const href =
      file.encoding === "base64"
        ? `data:${file.mimeType};base64,${file.content}`
        : `data:${file.mimeType};charset=utf-8,${encodeURIComponent(file.content)}`;
    const anchor = doc.createElement("a");
    anchor.href = href;
    anchor.download = file.filename;
    anchor.click();
  }
}
