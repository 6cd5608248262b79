"""Building the conditioning input for the background stage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..images import resize, validate_edge_image

Bbox = tuple[int, int, int, int]


@dataclass(frozen=True)
class BackgroundInput:
    """Scene-sized conditioning: pasted foreground + background sketch.

    ``fused`` stacks the RGB canvas with the sketch as a 4th channel, the
    exact tensor the translation network consumes.
    """

    canvas: np.ndarray  # (S, S, 3) in [-1, 1]
    background_sketch: np.ndarray  # (S, S) in [-1, 1]
    fused: np.ndarray  # (S, S, 4)

    @property
    def resolution(self) -> int:
        return int(self.canvas.shape[0])


def fuse(canvas: np.ndarray, background_sketch: np.ndarray) -> np.ndarray:
    if canvas.shape[:2] != background_sketch.shape:
        raise InputError(
            f"canvas {canvas.shape} and sketch {background_sketch.shape} disagree on resolution"
        )
    return np.concatenate(
        [canvas, background_sketch[..., None]], axis=2
    ).astype(np.float32)


def compose_background_input(
    foreground_patches: list[tuple[np.ndarray, Bbox]],
    background_sketch: np.ndarray,
    canvas_size: int,
    neutral_fill: float = 0.0,
) -> BackgroundInput:
    """Paste image patches into their boxes over a neutral canvas.

    Patches are resized to their bbox extents; overlaps resolve
    last-pasted-wins.  Boxes must lie inside the canvas.
    """
    background_sketch = np.asarray(background_sketch, dtype=np.float32)
    validate_edge_image(background_sketch)
    if background_sketch.shape != (canvas_size, canvas_size):
        raise InputError(
            f"background sketch {background_sketch.shape} != canvas ({canvas_size}, {canvas_size})"
        )
    canvas = np.full((canvas_size, canvas_size, 3), neutral_fill, dtype=np.float32)
    for patch, bbox in foreground_patches:
        x1, y1, x2, y2 = bbox
        if not (0 <= x1 < x2 <= canvas_size and 0 <= y1 < y2 <= canvas_size):
            raise InputError(f"bbox {bbox} outside canvas of size {canvas_size}")
        canvas[y1:y2, x1:x2] = resize(np.asarray(patch, dtype=np.float32), y2 - y1, x2 - x1)
    return BackgroundInput(
        canvas=canvas,
        background_sketch=background_sketch,
        fused=fuse(canvas, background_sketch),
    )
