"""Nearest-neighbour sketch retrieval over a per-category pool."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError, InputError
from ..images import read_png, validate_edge_image
from .edges import extract_edges
from .gabor import GaborBank, feature_distance, gabor_features

SPLITS = ("train", "test")


@dataclass
class PoolSketch:
    sketch_id: str
    category: str
    split: str
    pixels: np.ndarray  # (R, R) in [-1, 1]


@dataclass
class SketchPool:
    """Sketch store with cached band-pass features.

    Pool order is stable: ties in retrieval break toward the lowest index.
    """

    sketches: list[PoolSketch] = field(default_factory=list)
    bank: GaborBank = field(default_factory=GaborBank)
    _features: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def add(self, sketch_id: str, category: str, split: str, pixels: np.ndarray) -> None:
        if split not in SPLITS:
            raise InputError(f"split must be one of {SPLITS}, got {split!r}")
        pixels = validate_edge_image(pixels, f"sketch {sketch_id}")
        self.sketches.append(PoolSketch(sketch_id, category, split, pixels))

    def categories(self) -> list[str]:
        return sorted({s.category for s in self.sketches})

    def ids(self, split: str | None = None) -> list[str]:
        return [s.sketch_id for s in self.sketches if split in (None, s.split)]

    def select(self, category: str, split: str) -> list[tuple[int, PoolSketch]]:
        return [
            (i, s)
            for i, s in enumerate(self.sketches)
            if s.category == category and s.split == split
        ]

    def features_of(self, index: int) -> np.ndarray:
        if index not in self._features:
            self._features[index] = gabor_features(self.sketches[index].pixels, self.bank)
        return self._features[index]

    @classmethod
    def from_directory(cls, root: str | Path, bank: GaborBank | None = None) -> "SketchPool":
        """Load ``root/<split>/<category>/*.png`` into a pool."""
        root = Path(root)
        if not root.is_dir():
            raise DataError(f"sketch pool directory not found: {root}")
        pool = cls(bank=bank or GaborBank())
        for split in SPLITS:
            split_dir = root / split
            if not split_dir.is_dir():
                continue
            for cat_dir in sorted(p for p in split_dir.iterdir() if p.is_dir()):
                for png in sorted(cat_dir.glob("*.png")):
                    rel = png.relative_to(root).as_posix()
                    pool.add(rel, cat_dir.name, split, read_png(png, channels=1))
        if not pool.sketches:
            raise DataError(f"sketch pool at {root} contains no PNG sketches")
        return pool


def retrieve_sketch(
    object_image: np.ndarray,
    category: str,
    pool: SketchPool,
    split: str,
) -> tuple[PoolSketch, float]:
    """Most similar pool sketch to the object's extracted edge map (L2 over features)."""
    candidates = pool.select(category, split)
    if not candidates:
        raise DataError(f"sketch pool has no {category!r} sketches in split {split!r}")
    edge_map = extract_edges(object_image, style="standard")
    query = gabor_features(edge_map, pool.bank)

    best_index = None
    best_dist = np.inf
    for index, _ in candidates:
        dist = feature_distance(query, pool.features_of(index))
        if dist < best_dist:
            best_dist = dist
            best_index = index
    return pool.sketches[best_index], float(best_dist)
