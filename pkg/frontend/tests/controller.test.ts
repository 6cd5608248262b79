import { describe, expect, it, vi } from "vitest";

import { StudioClient, type FetchLike } from "../src/api";
import { StudioController } from "../src/controller";
import { sessionToRequest } from "../src/session";
import type { GenerateSceneRequest, Point } from "../src/types";

const CATEGORIES_BODY = {
  foreground: ["circle", "triangle"],
  background: ["sky"],
  object_resolution: 64,
  scene_resolution: 64,
};

const STROKE_A: Point[] = [
  [2, 2],
  [20, 2],
  [20, 20],
];
const STROKE_B: Point[] = [
  [0, 50],
  [63, 50],
];

/** In-memory stand-in for the generation service. Scenes are a pure
 * function of (strokes, seed); a null seed makes the server pick the next
 * one from a counter, like the real service draws a fresh RNG seed. */
function fakeServer() {
  let nextSeed = 1000;
  const requests: GenerateSceneRequest[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    if (String(url).endsWith("/categories")) {
      return new Response(JSON.stringify(CATEGORIES_BODY), { status: 200 });
    }
    const request = JSON.parse(init?.body as string) as GenerateSceneRequest;
    requests.push(request);
    const seed = request.seed ?? nextSeed++;
    const scene = `png:${seed}:${JSON.stringify(request.strokes)}`;
    return new Response(
      JSON.stringify({
        final_png: scene,
        foreground_canvas_png: `fg:${scene}`,
        background_sketch_png: `bg:${scene}`,
        patches: [],
        seed,
        timings: { total_seconds: 0.01, instances: request.strokes.length },
      }),
      { status: 200 },
    );
  };
  return { fetchImpl, requests };
}

async function startedController(
  fetchImpl: FetchLike,
  options: Parameters<typeof StudioController.start>[1] = {},
) {
  return StudioController.start(new StudioClient("http://server", fetchImpl), options);
}

describe("startup", () => {
  it("fetches the palette and selects the first foreground category", async () => {
    const server = fakeServer();
    const controller = await startedController(server.fetchImpl);
    expect(controller.state.palette.foreground).toEqual(["circle", "triangle"]);
    expect(controller.state.selectedCategory).toBe("circle");
    expect(controller.canvasSize).toBe(64);
  });

  it("fails fast when the palette endpoint is down", async () => {
    const fetchImpl: FetchLike = () => Promise.reject(new TypeError("refused"));
    await expect(startedController(fetchImpl)).rejects.toThrow(/unreachable/);
  });
});

describe("seed-locked regeneration", () => {
  it("replays the previous seed and renders the identical image", async () => {
    const server = fakeServer();
    const controller = await startedController(server.fetchImpl);
    controller.drawStroke(STROKE_A);

    await controller.requestGeneration();
    const first = controller.state.lastResponse!;
    expect(first.seed).toBe(1000); // server-picked: first request carried seed null

    await controller.requestGeneration();
    const second = controller.state.lastResponse!;
    expect(server.requests[1]!.seed).toBe(1000);
    expect(second.seed).toBe(first.seed);
    expect(second.final_png).toBe(first.final_png);
    expect(second.foreground_canvas_png).toBe(first.foreground_canvas_png);
  });

  it("changing strokes under a locked seed changes only the strokes", async () => {
    const server = fakeServer();
    const controller = await startedController(server.fetchImpl);
    controller.drawStroke(STROKE_A);
    await controller.requestGeneration();

    controller.selectCategory("sky");
    controller.drawStroke(STROKE_B);
    await controller.requestGeneration();

    const [first, second] = server.requests;
    expect(second!.seed).toBe(first!.seed ?? 1000);
    expect(second!.canvas_size).toBe(first!.canvas_size);
    expect(second!.strokes).toHaveLength(2);
    expect(controller.state.lastResponse!.final_png).not.toBe("png:1000:[]");
  });

  it("unlocking the seed asks the server for a fresh one", async () => {
    const server = fakeServer();
    const controller = await startedController(server.fetchImpl);
    controller.drawStroke(STROKE_A);
    await controller.requestGeneration();

    controller.toggleSeedLock();
    await controller.requestGeneration();
    expect(server.requests[1]!.seed).toBeNull();
    expect(controller.state.lastResponse!.seed).toBe(1001);
  });
});

describe("failure handling", () => {
  it("shows a banner when the server is down and keeps the canvas editable", async () => {
    const down: FetchLike = async (url) => {
      if (String(url).endsWith("/categories")) {
        return new Response(JSON.stringify(CATEGORIES_BODY), { status: 200 });
      }
      throw new TypeError("connection refused");
    };
    const controller = await startedController(down);
    controller.drawStroke(STROKE_A);

    await controller.requestGeneration();
    expect(controller.state.banner).toMatch(/unreachable/);
    expect(controller.state.strokes).toHaveLength(1);

    // Still editable: drawing and undo keep working after the failure.
    controller.drawStroke(STROKE_B);
    expect(controller.state.strokes).toHaveLength(2);
    controller.undo();
    expect(controller.state.strokes).toHaveLength(1);

    controller.dismissBanner();
    expect(controller.state.banner).toBeNull();
  });

  it("keeps the previous result when a later request fails", async () => {
    const server = fakeServer();
    let fail = false;
    const flaky: FetchLike = (url, init) => {
      if (fail && String(url).endsWith("/generate/scene")) {
        return Promise.resolve(
          new Response(JSON.stringify({ error: "model not loaded" }), { status: 503 }),
        );
      }
      return server.fetchImpl(url, init);
    };
    const controller = await startedController(flaky);
    controller.drawStroke(STROKE_A);
    await controller.requestGeneration();
    const good = controller.state.lastResponse!;

    fail = true;
    await controller.requestGeneration();
    expect(controller.state.banner).toContain("model not loaded");
    expect(controller.state.lastResponse).toBe(good);
  });

  it("reports a contract violation without calling the server", async () => {
    const server = fakeServer();
    const fetchSpy = vi.fn(server.fetchImpl);
    const controller = await startedController(fetchSpy, { canvasSize: -1 });
    controller.drawStroke(STROKE_A);
    await controller.requestGeneration();
    expect(controller.state.banner).toMatch(/contract/);
    expect(fetchSpy).toHaveBeenCalledTimes(1); // the palette fetch only
  });
});

describe("single in-flight request", () => {
  function gatedServer() {
    const server = fakeServer();
    let release: (() => void) | null = null;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    let first = true;
    const fetchImpl: FetchLike = async (url, init) => {
      // Record the request immediately, but hold the first scene response
      // open until the test releases it.
      const response = await server.fetchImpl(url, init);
      if (String(url).endsWith("/generate/scene") && first) {
        first = false;
        await gate;
      }
      return response;
    };
    return { fetchImpl, requests: server.requests, release: () => release!() };
  }

  it("queues a request made while one is in flight, never interleaving", async () => {
    const server = gatedServer();
    const controller = await startedController(server.fetchImpl, { pendingPolicy: "queue" });
    controller.drawStroke(STROKE_A);

    const firstCall = controller.requestGeneration();
    expect(controller.generationInFlight).toBe(true);
    controller.drawStroke(STROKE_B);
    const secondCall = controller.requestGeneration();

    // The queued request must not have been sent while the first is open.
    expect(server.requests).toHaveLength(1);
    server.release();
    await Promise.all([firstCall, secondCall]);

    expect(server.requests).toHaveLength(2);
    expect(server.requests[0]!.strokes).toHaveLength(1);
    expect(server.requests[1]!.strokes).toHaveLength(2); // latest state at send time
    expect(controller.generationInFlight).toBe(false);
  });

  it("drops the extra request under the ignore policy", async () => {
    const server = gatedServer();
    const controller = await startedController(server.fetchImpl, { pendingPolicy: "ignore" });
    controller.drawStroke(STROKE_A);

    const firstCall = controller.requestGeneration();
    const secondCall = controller.requestGeneration();
    server.release();
    await Promise.all([firstCall, secondCall]);

    expect(server.requests).toHaveLength(1);
  });
});

describe("export", () => {
  it("controller sessions replay to the exact request the controller would send", async () => {
    const server = fakeServer();
    const controller = await startedController(server.fetchImpl);
    controller.drawStroke(STROKE_A);
    await controller.requestGeneration();

    const replayed = sessionToRequest(controller.exportSession());
    await controller.requestGeneration();
    expect(replayed).toEqual(server.requests[1]);
  });
});
