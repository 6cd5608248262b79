from .pipeline import InstancePatch, SceneGenerationResult, generate_scene
from .segment import (
    SEGMENTATION_MODES,
    SceneSketch,
    SegmentationResult,
    Stroke,
    rasterize_strokes,
    scene_sketch_from_strokes,
    segment_scene,
)

__all__ = [
    "InstancePatch",
    "SceneGenerationResult",
    "generate_scene",
    "SEGMENTATION_MODES",
    "SceneSketch",
    "SegmentationResult",
    "Stroke",
    "rasterize_strokes",
    "scene_sketch_from_strokes",
    "segment_scene",
]
