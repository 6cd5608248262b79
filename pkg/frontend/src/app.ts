/** Browser bootstrap: mounts the studio onto a plain DOM element.
 *
 * Everything interesting lives in the controller and the pure state
 * module; this file only translates pointer events into strokes and
 * state changes into DOM updates.
 */

import { StudioClient } from "./api";
import { StudioController, type StudioControllerOptions } from "./controller";
import { exportFiles, triggerDownloads } from "./downloads";
import { paintStrokes } from "./render";
import { allCategories, type StudioState } from "./state";
import type { Point } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function pngSrc(base64: string): string {
  return `data:image/png;base64,${base64}`;
}

/** Build the studio UI inside `root` and return the live controller. */
export async function mountStudio(
  root: HTMLElement,
  serverUrl: string,
  options: StudioControllerOptions = {},
): Promise<StudioController> {
  const client = new StudioClient(serverUrl);

  const banner = el("div", "studio-banner");
  banner.hidden = true;
  const dismiss = el("button", "studio-banner-dismiss", "dismiss");
  banner.append(el("span", "studio-banner-text"), dismiss);

  const canvas = el("canvas", "studio-canvas");
  const toolbar = el("div", "studio-toolbar");
  const categorySelect = el("select", "studio-category");
  const undoButton = el("button", undefined, "undo");
  const seedLock = el("input");
  seedLock.type = "checkbox";
  const seedLockLabel = el("label", "studio-seed-lock", "lock seed");
  seedLockLabel.prepend(seedLock);
  const generateButton = el("button", undefined, "generate");
  const exportButton = el("button", undefined, "export");
  toolbar.append(categorySelect, undoButton, seedLockLabel, generateButton, exportButton);

  const finalView = el("img", "studio-final");
  const foregroundView = el("img", "studio-foreground");
  const backgroundView = el("img", "studio-background");
  const patchList = el("div", "studio-patches");
  const panels = el("div", "studio-panels");
  panels.append(finalView, foregroundView, backgroundView, patchList);

  root.append(banner, toolbar, canvas, panels);

  const render = (state: StudioState) => {
    banner.hidden = state.banner === null;
    banner.querySelector(".studio-banner-text")!.textContent = state.banner ?? "";
    categorySelect.value = state.selectedCategory;
    seedLock.checked = state.seedLocked;

    const ctx = canvas.getContext("2d")!;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    paintStrokes(state, ctx);

    const response = state.lastResponse;
    finalView.src = response ? pngSrc(response.final_png) : "";
    foregroundView.src = response ? pngSrc(response.foreground_canvas_png) : "";
    backgroundView.src = response ? pngSrc(response.background_sketch_png) : "";
    patchList.replaceChildren(
      ...(response?.patches ?? []).map((patch) => {
        const img = el("img", "studio-patch");
        img.src = pngSrc(patch.patch_png);
        img.title = `${patch.category} @ ${patch.bbox.join(",")}`;
        return img;
      }),
    );
  };

  const controller = await StudioController.start(client, { ...options, onChange: render });
  canvas.width = controller.canvasSize;
  canvas.height = controller.canvasSize;

  for (const category of allCategories(controller.state.palette)) {
    const option = el("option", undefined, category);
    option.value = category;
    categorySelect.append(option);
  }

  categorySelect.addEventListener("change", () => controller.selectCategory(categorySelect.value));
  undoButton.addEventListener("click", () => controller.undo());
  seedLock.addEventListener("change", () => controller.toggleSeedLock());
  generateButton.addEventListener("click", () => void controller.requestGeneration());
  exportButton.addEventListener("click", () => {
    triggerDownloads(exportFiles(controller.state, controller.exportSession()));
  });
  dismiss.addEventListener("click", () => controller.dismissBanner());

  let trace: Point[] | null = null;
  const tracePoint = (event: PointerEvent): Point => {
    const rect = canvas.getBoundingClientRect();
    return [
      ((event.clientX - rect.left) / rect.width) * canvas.width,
      ((event.clientY - rect.top) / rect.height) * canvas.height,
    ];
  };
  canvas.addEventListener("pointerdown", (event) => {
    canvas.setPointerCapture(event.pointerId);
    trace = [tracePoint(event)];
  });
  canvas.addEventListener("pointermove", (event) => {
    if (trace) trace.push(tracePoint(event));
  });
  canvas.addEventListener("pointerup", () => {
    if (trace) controller.drawStroke(trace);
    trace = null;
  });

  render(controller.state);
  return controller;
}
