"""Whole-scene generation: per-instance foreground synthesis, paste, background pass."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..background.compose import BackgroundInput, compose_background_input
from ..background.inference import BackgroundModel, generate_background
from ..errors import InputError
from ..images import NO_EDGE, resize
from ..object_gan.inference import infer_object
from ..object_gan.model import ObjectModelBundle
from .segment import SceneSketch, SegmentationResult


@dataclass(frozen=True)
class InstancePatch:
    """One generated foreground object before pasting."""

    category: str
    bbox: tuple[int, int, int, int]
    sketch_crop: np.ndarray  # object-resolution conditioning actually used
    patch: np.ndarray  # raw generator output at object resolution


@dataclass
class SceneGenerationResult:
    final_image: np.ndarray
    foreground_canvas: np.ndarray
    background_sketch: np.ndarray
    background_input: BackgroundInput
    patches: list[InstancePatch] = field(default_factory=list)
    paste_order: list[int] = field(default_factory=list)


def background_sketch_of(sketch: SceneSketch, seg: SegmentationResult) -> np.ndarray:
    """Sketch content routed to the background stage.

    With background instances present (labeled strokes or stored masks),
    keep exactly their ink.  Otherwise fall back to blanking the
    foreground bboxes out of the raster canvas.
    """
    if seg.background:
        out = np.full_like(sketch.canvas, NO_EDGE)
        for ann in seg.background:
            out[ann.mask] = sketch.canvas[ann.mask]
        return out
    out = sketch.canvas.copy()
    for ann in seg.foreground:
        x1, y1, x2, y2 = ann.bbox
        out[y1:y2, x1:x2] = NO_EDGE
    return out


def _instance_conditioning(
    sketch: SceneSketch, ann, object_resolution: int
) -> np.ndarray:
    """Isolate one instance's strokes and bring them to object resolution."""
    isolated = np.where(ann.mask, sketch.canvas, NO_EDGE)
    x1, y1, x2, y2 = ann.bbox
    return resize(isolated[y1:y2, x1:x2], object_resolution, object_resolution)


def generate_scene(
    sketch: SceneSketch,
    seg: SegmentationResult,
    object_bundle: ObjectModelBundle,
    background_model: BackgroundModel,
    rng: np.random.Generator,
) -> SceneGenerationResult:
    """Run the full sketch-to-scene pipeline; all intermediates returned.

    Foreground instances are generated independently, then pasted in an
    rng-shuffled order (disjoint boxes make the order immaterial); the
    background stage runs once on the pasted canvas plus background ink.
    """
    size = sketch.resolution
    if size != background_model.config.resolution:
        raise InputError(
            f"scene resolution {size} != background model resolution "
            f"{background_model.config.resolution}"
        )
    object_resolution = object_bundle.config.resolution

    patches: list[InstancePatch] = []
    for ann in seg.foreground:
        if ann.category not in object_bundle.categories:
            raise InputError(f"no object category {ann.category!r} in the trained model")
        category_index = object_bundle.categories.index(ann.category)
        conditioning = _instance_conditioning(sketch, ann, object_resolution)
        patch = infer_object(object_bundle, conditioning, category_index)
        patches.append(
            InstancePatch(
                category=ann.category,
                bbox=ann.bbox,
                sketch_crop=conditioning,
                patch=patch,
            )
        )

    paste_order = [int(i) for i in rng.permutation(len(patches))]
    ordered = [(patches[i].patch, patches[i].bbox) for i in paste_order]
    background_input = compose_background_input(
        ordered,
        background_sketch_of(sketch, seg),
        size,
        neutral_fill=background_model.config.neutral_fill,
    )
    final_image = generate_background(background_model, background_input)
    return SceneGenerationResult(
        final_image=final_image,
        foreground_canvas=background_input.canvas,
        background_sketch=background_input.background_sketch,
        background_input=background_input,
        patches=patches,
        paste_order=paste_order,
    )
