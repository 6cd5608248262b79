"""Scene-sketch segmentation: oracle pass-through and labeled-stroke grouping.

Free-form raster segmentation of unlabeled sketches is out of scope; the
pipeline takes either dataset ground truth (oracle) or stroke lists that
already carry category labels (as the drawing UI provides them).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image, ImageDraw

from ..errors import InputError
from ..images import INK, NO_EDGE, validate_edge_image
from ..data.records import InstanceAnnotation, validate_bbox

MIN_FOREGROUND_BBOX_AREA = 16

SEGMENTATION_MODES = ("oracle", "labeled_strokes")


@dataclass(frozen=True)
class Stroke:
    """One labeled polyline in canvas pixel coordinates."""

    points: np.ndarray  # (N, 2) float, columns (x, y)
    category: str

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float32)
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 1:
            raise InputError(f"stroke points must be (N, 2) with N >= 1, got {points.shape}")
        object.__setattr__(self, "points", points)

    def bbox(self, size: int, pad: int = 1) -> tuple[int, int, int, int]:
        xs, ys = self.points[:, 0], self.points[:, 1]
        x1 = max(int(np.floor(xs.min())) - pad, 0)
        y1 = max(int(np.floor(ys.min())) - pad, 0)
        x2 = min(int(np.ceil(xs.max())) + pad + 1, size)
        y2 = min(int(np.ceil(ys.max())) + pad + 1, size)
        return (x1, y1, x2, y2)


@dataclass(frozen=True)
class SceneSketch:
    canvas: np.ndarray  # (S, S) edge image in [-1, 1]
    strokes: list[Stroke] | None = None

    def __post_init__(self):
        validate_edge_image(self.canvas)
        if self.strokes is not None:
            size = self.canvas.shape[0]
            for stroke in self.strokes:
                pts = stroke.points
                if (pts < 0).any() or (pts >= size).any():
                    raise InputError(
                        f"stroke points outside the {size}x{size} canvas"
                    )

    @property
    def resolution(self) -> int:
        return int(self.canvas.shape[0])


@dataclass(frozen=True)
class SegmentationResult:
    foreground: list[InstanceAnnotation] = field(default_factory=list)
    background: list[InstanceAnnotation] = field(default_factory=list)


def rasterize_strokes(strokes: list[Stroke], size: int, width: int = 2) -> np.ndarray:
    """Draw polylines as ink on a white canvas; returns an edge image."""
    img = Image.new("L", (size, size), 255)
    draw = ImageDraw.Draw(img)
    for stroke in strokes:
        pts = [(float(x), float(y)) for x, y in stroke.points]
        if len(pts) == 1:
            draw.point(pts, fill=0)
        else:
            draw.line(pts, fill=0, width=width, joint="curve")
    return (np.asarray(img, dtype=np.float32) / 127.5 - 1.0).clip(INK, NO_EDGE)


def scene_sketch_from_strokes(strokes: list[Stroke], size: int, width: int = 2) -> SceneSketch:
    return SceneSketch(canvas=rasterize_strokes(strokes, size, width), strokes=list(strokes))


def _bboxes_overlap(a, b) -> bool:
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def _merge_bbox(a, b) -> tuple[int, int, int, int]:
    return (min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3]))


def _group_strokes(
    strokes: list[tuple[int, Stroke]], size: int, width: int
) -> list[InstanceAnnotation]:
    """Merge same-category strokes whose bboxes overlap into instances."""
    boxes = [stroke.bbox(size) for _, stroke in strokes]
    parent = list(range(len(strokes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    changed = True
    merged = list(boxes)
    while changed:
        changed = False
        for i in range(len(strokes)):
            for j in range(i + 1, len(strokes)):
                ri, rj = find(i), find(j)
                if ri != rj and _bboxes_overlap(merged[ri], merged[rj]):
                    parent[rj] = ri
                    merged[ri] = _merge_bbox(merged[ri], merged[rj])
                    changed = True

    groups: dict[int, list[int]] = {}
    for i in range(len(strokes)):
        groups.setdefault(find(i), []).append(i)

    instances = []
    for root in sorted(groups):
        members = groups[root]
        bbox = merged[find(root)]
        raster = rasterize_strokes([strokes[i][1] for i in members], size, width)
        mask = raster < 0.0
        category = strokes[members[0]][1].category
        instances.append(InstanceAnnotation(category=category, bbox=bbox, mask=mask))
    return instances


def segment_scene(
    sketch: SceneSketch,
    mode: str,
    foreground_categories: list[str],
    background_categories: list[str],
    annotations: list[InstanceAnnotation] | None = None,
    stroke_width: int = 2,
) -> SegmentationResult:
    """Split a scene sketch into labeled foreground and background instances.

    oracle: return dataset annotations verbatim (routing each by category).
    labeled_strokes: group the sketch's labeled strokes — same-category
    strokes with overlapping bboxes form one instance whose bbox is their
    union and whose mask is their rasterization.  Foreground instances
    with bbox area < 16 px are dropped as degenerate.
    """
    if mode not in SEGMENTATION_MODES:
        raise InputError(f"unknown segmentation mode {mode!r}; expected {SEGMENTATION_MODES}")
    fg_set, bg_set = set(foreground_categories), set(background_categories)
    size = sketch.resolution

    if mode == "oracle":
        if annotations is None:
            raise InputError("oracle mode requires dataset annotations")
        foreground, background = [], []
        for ann in annotations:
            validate_bbox(ann.bbox, size)
            if ann.category in fg_set:
                foreground.append(ann)
            elif ann.category in bg_set:
                background.append(ann)
            else:
                raise InputError(f"annotation category {ann.category!r} not configured")
        foreground = [a for a in foreground if a.bbox_area() >= MIN_FOREGROUND_BBOX_AREA]
        return SegmentationResult(foreground=foreground, background=background)

    if sketch.strokes is None:
        raise InputError("labeled_strokes mode requires a stroke list")
    unknown = sorted(
        {s.category for s in sketch.strokes} - fg_set - bg_set
    )
    if unknown:
        raise InputError(f"stroke categories not configured: {unknown}")

    foreground, background = [], []
    for category in sorted({s.category for s in sketch.strokes}):
        members = [(i, s) for i, s in enumerate(sketch.strokes) if s.category == category]
        instances = _group_strokes(members, size, stroke_width)
        if category in fg_set:
            foreground.extend(
                a for a in instances if a.bbox_area() >= MIN_FOREGROUND_BBOX_AREA
            )
        else:
            background.extend(instances)
    return SegmentationResult(foreground=foreground, background=background)
