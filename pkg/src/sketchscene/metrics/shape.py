"""Faithfulness of a generated image to the sketch that conditioned it."""

from __future__ import annotations

import numpy as np

from ..data.edges import extract_edges
from ..data.gabor import GaborBank, feature_distance, gabor_features
from ..errors import InputError

_DEFAULT_BANK = GaborBank()


def shape_similarity(
    input_sketch: np.ndarray,
    generated: np.ndarray,
    bank: GaborBank | None = None,
) -> float:
    """L2 distance between texture features of the sketch and of the
    generated image's edge map; 0 means edge-identical, lower is better."""
    input_sketch = np.asarray(input_sketch, dtype=np.float32)
    generated = np.asarray(generated, dtype=np.float32)
    if input_sketch.shape != generated.shape[:2]:
        raise InputError(
            f"sketch {input_sketch.shape} and image {generated.shape} resolutions differ"
        )
    bank = bank or _DEFAULT_BANK
    edges = extract_edges(generated, style="standard")
    return float(
        feature_distance(
            gabor_features(input_sketch, bank), gabor_features(edges, bank)
        )
    )
