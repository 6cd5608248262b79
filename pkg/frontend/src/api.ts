/** HTTP client for the inference service.
 *
 * Read-only towards the server: it only calls GET /categories and
 * POST /generate/scene (which is stateless server-side). Every outgoing
 * payload is validated against the request contract before the fetch.
 */

import { z } from "zod";
import type {
  CategoryPalette,
  GenerateSceneRequest,
  GenerateSceneResponse,
} from "./types";

export const generateSceneRequestSchema = z.object({
  strokes: z.array(
    z.object({
      points: z.array(z.tuple([z.number(), z.number()])).min(2),
      category: z.string().min(1),
    }),
  ),
  canvas_size: z.number().int().positive(),
  seed: z.number().int().nonnegative().nullable(),
});

const categoriesResponseSchema = z.object({
  foreground: z.array(z.string()).min(1),
  background: z.array(z.string()),
  object_resolution: z.number().int().positive(),
  scene_resolution: z.number().int().positive(),
});

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class StudioClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async fetchCategories(): Promise<CategoryPalette> {
    const parsed = categoriesResponseSchema.safeParse(
      await this.requestJson("/categories", { method: "GET" }),
    );
    if (!parsed.success) {
      const issue = parsed.error.issues[0];
      throw new ApiError(
        `categories response violates the contract: ${
          issue ? `${issue.path.join(".")}: ${issue.message}` : "unknown"
        }`,
      );
    }
    const body = parsed.data;
    return {
      foreground: body.foreground,
      background: body.background,
      objectResolution: body.object_resolution,
      sceneResolution: body.scene_resolution,
    };
  }

  async generateScene(request: GenerateSceneRequest): Promise<GenerateSceneResponse> {
    const parsed = generateSceneRequestSchema.safeParse(request);
    if (!parsed.success) {
      const issue = parsed.error.issues[0];
      throw new ApiError(
        `request payload violates the contract: ${issue ? `${issue.path.join(".")}: ${issue.message}` : "unknown"}`,
      );
    }
    return (await this.requestJson("/generate/scene", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(parsed.data),
    })) as GenerateSceneResponse;
  }

  private async requestJson(path: string, init: RequestInit): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      throw new ApiError(`server unreachable: ${reason}`);
    }
    if (!response.ok) {
      let detail = `request failed with status ${response.status}`;
      try {
        const body = (await response.json()) as { error?: unknown };
        if (typeof body.error === "string") {
          detail = body.error;
        }
      } catch {
        // non-JSON error body; keep the status message
      }
      throw new ApiError(detail, response.status);
    }
    return response.json();
  }
}
