"""JSON-over-HTTP inference service wrapping the object and scene pipelines.

Images travel as base64 PNG strings.  The only server state is the loaded
model pair; request handling is stateless and deterministic given
(request, seed), with a bounded in-flight count guarding memory.
"""

from __future__ import annotations

import base64
import threading
import time

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .background.inference import BackgroundModel, generate_background
from .errors import InputError, SketchSceneError, StateError
from .images import decode_png_bytes, encode_png_bytes, resize
from .object_gan.inference import infer_object
from .object_gan.model import ObjectModelBundle
from .scene.pipeline import generate_scene
from .scene.segment import Stroke, scene_sketch_from_strokes, segment_scene

DEFAULT_MAX_IN_FLIGHT = 4


class StrokePayload(BaseModel):
    points: list[tuple[float, float]] = Field(min_length=1)
    category: str


class GenerateObjectRequest(BaseModel):
    sketch_png: str
    category: str


class GenerateSceneRequest(BaseModel):
    strokes: list[StrokePayload] = Field(default_factory=list)
    canvas_size: int | None = None
    seed: int | None = None


def _b64_png(image: np.ndarray) -> str:
    return base64.b64encode(encode_png_bytes(image)).decode("ascii")


def _png_b64_to_image(data: str, channels: int) -> np.ndarray:
    try:
        raw = base64.b64decode(data, validate=True)
    except Exception as exc:
        raise InputError(f"sketch_png is not valid base64: {exc}") from exc
    return decode_png_bytes(raw, channels=channels)


class ServiceState:
    def __init__(
        self,
        object_bundle: ObjectModelBundle | None,
        background_model: BackgroundModel | None,
        background_categories: list[str],
        max_in_flight: int,
    ):
        self.object_bundle = object_bundle
        self.background_model = background_model
        self.background_categories = list(background_categories)
        self.gate = threading.BoundedSemaphore(max_in_flight)

    @property
    def loaded(self) -> bool:
        return self.object_bundle is not None and self.background_model is not None

    def require_loaded(self) -> None:
        if not self.loaded:
            raise StateError("models are not loaded")


def create_app(
    object_checkpoint: str | None = None,
    background_checkpoint: str | None = None,
    background_categories: list[str] | None = None,
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    object_bundle: ObjectModelBundle | None = None,
    background_model: BackgroundModel | None = None,
) -> FastAPI:
    """Build the service; checkpoints load eagerly when paths are given.

    Pre-loaded model objects may be passed directly (tests, embedding).
    """
    if object_checkpoint is not None:
        object_bundle, _ = ObjectModelBundle.load(object_checkpoint)
    if background_checkpoint is not None:
        background_model, _ = BackgroundModel.load(background_checkpoint)

    app = FastAPI(title="sketchscene", version="0.1.0")
    state = ServiceState(
        object_bundle,
        background_model,
        background_categories or [],
        max_in_flight,
    )
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:3])})

    @app.exception_handler(InputError)
    async def bad_input(request: Request, exc: InputError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(StateError)
    async def not_ready(request: Request, exc: StateError):
        return JSONResponse(status_code=503, content={"error": str(exc)})

    @app.exception_handler(SketchSceneError)
    async def module_error(request: Request, exc: SketchSceneError):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    def _acquire():
        if not state.gate.acquire(blocking=False):
            return JSONResponse(
                status_code=429,
                content={"error": "too many in-flight requests; retry shortly"},
                headers={"Retry-After": "1"},
            )
        return None

    @app.get("/healthz")
    def healthz():
        if not state.loaded:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok"}

    @app.get("/categories")
    def categories():
        state.require_loaded()
        return {
            "foreground": list(state.object_bundle.categories),
            "background": state.background_categories,
            "object_resolution": state.object_bundle.config.resolution,
            "scene_resolution": state.background_model.config.resolution,
        }

    @app.post("/generate/object")
    def generate_object(req: GenerateObjectRequest):
        state.require_loaded()
        busy = _acquire()
        if busy is not None:
            return busy
        try:
            bundle = state.object_bundle
            if req.category not in bundle.categories:
                raise InputError(
                    f"unknown category {req.category!r}; valid: {bundle.categories}"
                )
            sketch = _png_b64_to_image(req.sketch_png, channels=1)
            r = bundle.config.resolution
            if sketch.shape != (r, r):
                sketch = resize(sketch, r, r)
            image = infer_object(bundle, sketch, bundle.categories.index(req.category))
            return {"image_png": _b64_png(image), "category": req.category}
        finally:
            state.gate.release()

    @app.post("/generate/scene")
    def generate_scene_endpoint(req: GenerateSceneRequest):
        state.require_loaded()
        busy = _acquire()
        if busy is not None:
            return busy
        try:
            started = time.perf_counter()
            size = req.canvas_size or state.background_model.config.resolution
            seed = req.seed if req.seed is not None else int(
                np.random.default_rng().integers(0, 2**31 - 1)
            )
            strokes = [
                Stroke(points=np.asarray(s.points, dtype=np.float32), category=s.category)
                for s in req.strokes
            ]
            sketch = scene_sketch_from_strokes(strokes, size)
            seg = segment_scene(
                sketch,
                "labeled_strokes",
                state.object_bundle.categories,
                state.background_categories,
            )
            result = generate_scene(
                sketch,
                seg,
                state.object_bundle,
                state.background_model,
                np.random.default_rng(seed),
            )
            return {
                "final_png": _b64_png(result.final_image),
                "foreground_canvas_png": _b64_png(result.foreground_canvas),
                "background_sketch_png": _b64_png(result.background_sketch),
                "patches": [
                    {
                        "category": p.category,
                        "bbox": list(p.bbox),
                        "patch_png": _b64_png(p.patch),
                    }
                    for p in result.patches
                ],
                "seed": seed,
                "timings": {
                    "total_seconds": time.perf_counter() - started,
                    "instances": len(result.patches),
                },
            }
        finally:
            state.gate.release()

    return app
