"""Ingesting externally annotated scenes from a directory of label maps.

Expected layout::

    source_root/
      categories.json        {"foreground": {"1": "cat", ...}, "background": {"9": "grass", ...}}
      images/<id>.png        RGB scene photos
      labels/<id>.png        uint8 per-pixel category ids (0 = unlabeled)

Foreground instances are split out of the label map by connected
components; background categories become whole region masks.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from ..errors import DataError
from ..images import read_png
from .records import InstanceAnnotation, SourceScene


def _component_bbox(mask: np.ndarray) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(mask)
    return (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def read_source_directory(root: str | Path, min_instance_area: int = 16) -> list[SourceScene]:
    """Load every annotated scene under ``root`` as SourceScene records."""
    root = Path(root)
    cat_path = root / "categories.json"
    if not cat_path.is_file():
        raise DataError(f"missing categories.json under {root}")
    spec = json.loads(cat_path.read_text())
    fg_by_value = {int(k): v for k, v in spec.get("foreground", {}).items()}
    bg_by_value = {int(k): v for k, v in spec.get("background", {}).items()}

    image_paths = sorted((root / "images").glob("*.png"))
    if not image_paths:
        raise DataError(f"no images under {root / 'images'}")

    scenes = []
    for image_path in image_paths:
        label_path = root / "labels" / image_path.name
        if not label_path.is_file():
            raise DataError(f"missing label map for {image_path.name}")
        image = read_png(image_path, channels=3)
        labels = np.asarray(Image.open(label_path).convert("L"))
        if labels.shape != image.shape[:2]:
            raise DataError(
                f"label map {label_path.name} shape {labels.shape} does not match image"
            )

        instances = []
        for value, category in sorted(fg_by_value.items()):
            components, n = ndimage.label(labels == value)
            for ci in range(1, n + 1):
                mask = components == ci
                if int(mask.sum()) < min_instance_area:
                    continue
                instances.append(
                    InstanceAnnotation(
                        category=category, bbox=_component_bbox(mask), mask=mask
                    )
                )
        regions = {
            category: labels == value
            for value, category in sorted(bg_by_value.items())
            if bool((labels == value).any())
        }
        scenes.append(
            SourceScene(image=image, instances=instances, background_regions=regions)
        )
    return scenes
