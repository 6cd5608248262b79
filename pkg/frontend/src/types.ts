/** Wire types shared with the inference service, plus client-side shapes. */

export type Point = [number, number];

export interface Stroke {
  points: Point[];
  category: string;
}

/** Palette and resolutions reported by GET /categories. */
export interface CategoryPalette {
  foreground: string[];
  background: string[];
  objectResolution: number;
  sceneResolution: number;
}

/** Body of POST /generate/scene. The client always sends every field;
 * seed null asks the server to pick one. */
export interface GenerateSceneRequest {
  strokes: Stroke[];
  canvas_size: number;
  seed: number | null;
}

export interface ScenePatch {
  category: string;
  bbox: [number, number, number, number];
  patch_png: string;
}

export interface GenerateSceneResponse {
  final_png: string;
  foreground_canvas_png: string;
  background_sketch_png: string;
  patches: ScenePatch[];
  seed: number;
  timings: { total_seconds: number; instances: number };
}
