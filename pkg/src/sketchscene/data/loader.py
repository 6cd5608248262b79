"""Reading built datasets back into memory with reproducible batch order."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataError
from ..images import read_png
from .records import InstanceAnnotation


def _read_manifest(root: Path) -> dict:
    path = root / "manifest.json"
    if not path.is_file():
        raise DataError(f"no manifest at {path}; not a built dataset")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"corrupted record file: {path}: {exc}") from exc


def _read_image(path: Path, channels: int) -> np.ndarray:
    if not path.is_file():
        raise DataError(f"missing record file: {path}")
    try:
        return read_png(path, channels=channels)
    except DataError:
        raise
    except Exception as exc:  # truncated/garbled PNG
        raise DataError(f"corrupted record file: {path}: {exc}") from exc


def shuffled_indices(n: int, seed: int, epoch: int) -> np.ndarray:
    """Record order for one epoch; a pure function of (seed, epoch)."""
    return np.random.default_rng([seed, 577, epoch]).permutation(n)


class _Split:
    """Base: a list of record directories plus batch iteration."""

    def __init__(self, root: Path, split: str, manifest: dict):
        self.root = root
        self.split = split
        self.manifest = manifest

    def __len__(self) -> int:
        return len(self._records)

    def load(self, index: int) -> dict:
        raise NotImplementedError

    def batches(self, batch_size: int, seed: int, epoch: int):
        """Yield batches covering every record exactly once per epoch."""
        if batch_size < 1:
            raise DataError(f"batch_size must be >= 1, got {batch_size}")
        order = shuffled_indices(len(self), seed, epoch)
        for start in range(0, len(order), batch_size):
            chunk = [self.load(int(i)) for i in order[start : start + batch_size]]
            yield self._collate(chunk)

    def _collate(self, chunk: list[dict]) -> dict:
        out: dict = {}
        for key in chunk[0]:
            values = [item[key] for item in chunk]
            if isinstance(values[0], np.ndarray):
                out[key] = np.stack(values)
            elif isinstance(values[0], (int, np.integer)):
                out[key] = np.asarray(values, dtype=np.int64)
            else:
                out[key] = values
        return out


class ObjectSplit(_Split):
    """Per-object records: photo crop, retrieved sketch, edge maps, category."""

    def __init__(self, root: Path, split: str, manifest: dict):
        super().__init__(root, split, manifest)
        self.categories = list(manifest["categories"]["foreground"])
        self._records = [
            (rel.split("/", 1)[0], rel)
            for rel in manifest["records"]["objects"][split]
        ]

    def category_counts(self) -> dict[str, int]:
        counts = {cat: 0 for cat in self.categories}
        for category, _rel in self._records:
            counts[category] += 1
        return counts

    def load(self, index: int) -> dict:
        category, rel = self._records[index]
        rec_dir = self.root / "objects" / self.split / rel
        meta_path = rec_dir / "meta.json"
        try:
            meta = json.loads(meta_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"corrupted record file: {meta_path}: {exc}") from exc
        return {
            "image": _read_image(rec_dir / "image.png", 3),
            "sketch": _read_image(rec_dir / "sketch.png", 1),
            "edge_xdog": _read_image(rec_dir / "edge_xdog.png", 1),
            "edge_standard": _read_image(rec_dir / "edge_standard.png", 1),
            "category": category,
            "category_index": self.categories.index(category),
            "sketch_id": meta["sketch_id"],
        }


class BackgroundPairSplit(_Split):
    """Composite conditioning triples: foreground canvas, background sketch, scene."""

    def __init__(self, root: Path, split: str, manifest: dict):
        super().__init__(root, split, manifest)
        self._records = list(manifest["records"]["scenes"][split])

    def load(self, index: int) -> dict:
        scene_id = self._records[index]
        comp_dir = self.root / "composites" / self.split / scene_id
        return {
            "canvas": _read_image(comp_dir / "canvas.png", 3),
            "background_sketch": _read_image(comp_dir / "background_sketch.png", 1),
            "scene": _read_image(comp_dir / "scene.png", 3),
            "scene_id": scene_id,
        }


class SceneSplit(_Split):
    """Full scenes with sketches and segmentation annotations."""

    def __init__(self, root: Path, split: str, manifest: dict):
        super().__init__(root, split, manifest)
        self._records = list(manifest["records"]["scenes"][split])

    def load(self, index: int) -> dict:
        scene_id = self._records[index]
        scene_dir = self.root / "scenes" / self.split / scene_id
        seg_dir = self.root / "segmentation" / self.split / scene_id
        ann_path = seg_dir / "annotations.json"
        try:
            ann = json.loads(ann_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"corrupted record file: {ann_path}: {exc}") from exc
        instances = []
        for entry in ann["instances"]:
            mask_path = seg_dir / entry["mask"]
            try:
                mask = np.asarray(Image.open(mask_path).convert("L")) > 127
            except Exception as exc:
                raise DataError(f"corrupted record file: {mask_path}: {exc}") from exc
            instances.append(
                InstanceAnnotation(
                    category=entry["category"],
                    bbox=tuple(entry["bbox"]),
                    mask=mask,
                )
            )
        return {
            "image": _read_image(scene_dir / "image.png", 3),
            "sketch": _read_image(scene_dir / "sketch.png", 1),
            "instances": instances,
            "scene_id": scene_id,
        }

    def _collate(self, chunk: list[dict]) -> dict:
        out = super()._collate(chunk)
        out["instances"] = [item["instances"] for item in chunk]
        return out


_KIND_CLASSES = {
    "object": ObjectSplit,
    "background_pair": BackgroundPairSplit,
    "scene": SceneSplit,
}


def load_split(root: str | Path, kind: str, split: str):
    """Open one split of a built dataset.

    kind is one of {"object", "background_pair", "scene"}; split is
    {"train", "test"}.  Returns a dataset with ``load(i)`` random access
    and ``batches(batch_size, seed, epoch)`` whose order depends only on
    (seed, epoch).
    """
    if kind not in _KIND_CLASSES:
        raise DataError(f"unknown dataset kind {kind!r}; expected one of {sorted(_KIND_CLASSES)}")
    if split not in ("train", "test"):
        raise DataError(f"unknown split {split!r}; expected 'train' or 'test'")
    root = Path(root)
    manifest = _read_manifest(root)
    return _KIND_CLASSES[kind](root, split, manifest)
