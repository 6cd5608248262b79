/** Glue between the pure state machine and the HTTP client.
 *
 * The controller owns a StudioState, funnels every mutation through the
 * transition functions, and enforces the one-request-at-a-time rule for
 * scene generation. It never talks to the DOM; callers subscribe via
 * onChange and render however they like.
 */

import { ApiError, StudioClient } from "./api";
import { buildRequest, exportSession, type SessionFile } from "./session";
import * as transitions from "./state";
import type { StudioState } from "./state";
import type { GenerateSceneResponse, Point } from "./types";

/** What to do when a generation is requested while one is in flight:
 * remember it and run once the current one settles, or drop it. Requests
 * are never interleaved either way. */
export type PendingRequestPolicy = "queue" | "ignore";

export interface StudioControllerOptions {
  /** Canvas size sent with every request; defaults to the server's scene resolution. */
  canvasSize?: number;
  pendingPolicy?: PendingRequestPolicy;
  onChange?: (state: StudioState) => void;
}

export class StudioController {
  readonly canvasSize: number;
  readonly pendingPolicy: PendingRequestPolicy;

  private state_: StudioState;
  private inFlight = false;
  private queued = false;
  private readonly onChange: (state: StudioState) => void;

  private constructor(
    private readonly client: StudioClient,
    state: StudioState,
    options: StudioControllerOptions,
  ) {
    this.state_ = state;
    this.canvasSize = options.canvasSize ?? state.palette.sceneResolution;
    this.pendingPolicy = options.pendingPolicy ?? "queue";
    this.onChange = options.onChange ?? (() => {});
  }

  /** Fetch the category palette from the server and build a ready controller. */
  static async start(
    client: StudioClient,
    options: StudioControllerOptions = {},
  ): Promise<StudioController> {
    const palette = await client.fetchCategories();
    return new StudioController(client, transitions.createState(palette), options);
  }

  get state(): StudioState {
    return this.state_;
  }

  get generationInFlight(): boolean {
    return this.inFlight;
  }

  private commit(next: StudioState): void {
    if (next === this.state_) {
      return;
    }
    this.state_ = next;
    this.onChange(next);
  }

  drawStroke(points: Point[]): void {
    this.commit(transitions.addStroke(this.state_, points));
  }

  undo(): void {
    this.commit(transitions.undo(this.state_));
  }

  selectCategory(category: string): void {
    this.commit(transitions.selectCategory(this.state_, category));
  }

  toggleSeedLock(): void {
    this.commit(transitions.toggleSeedLock(this.state_));
  }

  dismissBanner(): void {
    this.commit(transitions.dismissBanner(this.state_));
  }

  /** Send the current strokes to the server and apply the result. While a
   * request is active further calls are queued or ignored per the policy.
   * Failures surface as a banner; the canvas stays editable throughout. */
  async requestGeneration(): Promise<void> {
    if (this.inFlight) {
      if (this.pendingPolicy === "queue") {
        this.queued = true;
      }
      return;
    }
    this.inFlight = true;
    try {
      await this.runGeneration();
      while (this.queued) {
        this.queued = false;
        await this.runGeneration();
      }
    } finally {
      this.inFlight = false;
    }
  }

  private async runGeneration(): Promise<void> {
    let response: GenerateSceneResponse;
    try {
      response = await this.client.generateScene(buildRequest(this.state_, this.canvasSize));
    } catch (err) {
      const message = err instanceof ApiError ? err.message : String(err);
      this.commit(transitions.showBanner(this.state_, message));
      return;
    }
    this.commit(transitions.applyResponse(this.state_, response));
  }

  exportSession(): SessionFile {
    return exportSession(this.state_, this.canvasSize);
  }
}
