"""Random placement of background sketches inside category mask regions."""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from .retrieval import SketchPool


def composite_background(
    region_masks: dict[str, np.ndarray],
    pool: SketchPool,
    rng: np.random.Generator,
    *,
    split: str = "train",
    density_area: int = 1024,  # one sketch per this many mask pixels (32x32 default)
    size_range: tuple[int, int] = (24, 40),
) -> list[tuple[np.ndarray, tuple[int, int, int, int], str, str]]:
    """Place pool sketches at random positions within each category's region.

    Returns (sketch pixels, bbox, category, sketch_id) tuples.  Every bbox
    center lies on a true pixel of its category mask; boxes are clipped to
    the canvas.  An empty or absent region yields no placements.
    """
    placements = []
    canvas_shape = None
    for category in sorted(region_masks):
        mask = np.asarray(region_masks[category], dtype=bool)
        if mask.ndim != 2:
            raise InputError(f"region mask for {category!r} must be 2-d")
        if canvas_shape is None:
            canvas_shape = mask.shape
        elif mask.shape != canvas_shape:
            raise InputError("all region masks must share one canvas shape")

        area = int(mask.sum())
        count = area // density_area
        if count == 0:
            continue
        candidates = pool.select(category, split)
        if not candidates:
            continue
        ys, xs = np.nonzero(mask)
        h, w = mask.shape
        for _ in range(count):
            pick = int(rng.integers(len(ys)))
            cy, cx = int(ys[pick]), int(xs[pick])
            size = int(rng.integers(size_range[0], size_range[1] + 1))
            half = size // 2
            x1 = max(cx - half, 0)
            y1 = max(cy - half, 0)
            x2 = min(cx + (size - half), w)
            y2 = min(cy + (size - half), h)
            if x2 - x1 < 2 or y2 - y1 < 2:
                continue
            pool_index, record = candidates[int(rng.integers(len(candidates)))]
            placements.append(
                (record.pixels, (x1, y1, x2, y2), category, record.sketch_id)
            )
    return placements
