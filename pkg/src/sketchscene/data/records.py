"""Dataset record types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError

Bbox = tuple[int, int, int, int]  # (x1, y1, x2, y2), exclusive lower-right


def validate_bbox(bbox: Bbox, canvas: int, name: str = "bbox") -> Bbox:
    x1, y1, x2, y2 = (int(v) for v in bbox)
    if not (x1 < x2 and y1 < y2):
        raise InputError(f"{name} corners must satisfy x1 < x2 and y1 < y2, got {bbox}")
    if x1 < 0 or y1 < 0 or x2 > canvas or y2 > canvas:
        raise InputError(f"{name} {bbox} lies outside the {canvas}x{canvas} canvas")
    return (x1, y1, x2, y2)


@dataclass
class InstanceAnnotation:
    category: str
    bbox: Bbox
    mask: np.ndarray  # bool (H, W), true on the instance's pixels

    def bbox_area(self) -> int:
        x1, y1, x2, y2 = self.bbox
        return (x2 - x1) * (y2 - y1)


@dataclass
class ObjectTriplet:
    """Object-level training record: photo crop, retrieved sketch, edge maps."""

    image: np.ndarray  # (R, R, 3)
    sketch: np.ndarray  # (R, R)
    edge_maps: dict[str, np.ndarray]  # style tag -> (R, R)
    category: str
    sketch_id: str = ""

    def __post_init__(self):
        if not self.edge_maps:
            raise InputError("ObjectTriplet needs at least one edge style")
        res = self.image.shape[0]
        entities = [self.image.shape[:2], self.sketch.shape] + [
            e.shape for e in self.edge_maps.values()
        ]
        if any(shape != (res, res) for shape in entities):
            raise InputError("ObjectTriplet entities must share one square resolution")


@dataclass
class SceneRecord:
    """Scene-level ground truth linking all tuple kinds."""

    scene_id: str
    split: str
    scene_image: np.ndarray  # (S, S, 3)
    scene_sketch: np.ndarray  # (S, S)
    composite_canvas: np.ndarray  # (S, S, 3): real foreground crops on neutral fill
    background_sketch: np.ndarray  # (S, S)
    annotations: list[InstanceAnnotation] = field(default_factory=list)
    sketch_ids: list[str] = field(default_factory=list)


@dataclass
class SourceScene:
    """Builder input: an image with per-instance masks and background regions."""

    image: np.ndarray  # (S, S, 3) in [-1, 1]
    instances: list[InstanceAnnotation]
    background_regions: dict[str, np.ndarray]  # category -> bool mask (S, S)
