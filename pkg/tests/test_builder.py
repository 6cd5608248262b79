"""Dataset builder contracts: splits, layout, determinism, filtering."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from sketchscene.data import (
    BuildConfig,
    ToyConfig,
    build_dataset,
    load_split,
    make_toy_sketch_pool,
    make_toy_source,
)
from sketchscene.errors import DataError

from conftest import build_toy_dataset


def _tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(root)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


@pytest.fixture(scope="module")
def manifest(small_dataset):
    return json.loads((small_dataset / "manifest.json").read_text())


def test_manifest_counts_add_up(manifest):
    counts = manifest["counts"]["scenes"]
    assert counts["train"] + counts["test"] == 24
    assert counts["train"] == round(24 * 0.8)


def test_split_purity_no_shared_sketch_ids(manifest):
    train_ids = set(manifest["sketch_ids"]["train"])
    test_ids = set(manifest["sketch_ids"]["test"])
    assert train_ids and test_ids
    assert not train_ids & test_ids


def test_rebuild_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    build_toy_dataset(a, scenes=12, size=64, seed=3)
    build_toy_dataset(b, scenes=12, size=64, seed=3)
    assert _tree_digest(a) == _tree_digest(b)


def test_different_seed_changes_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    build_toy_dataset(a, scenes=12, size=64, seed=3)
    build_toy_dataset(b, scenes=12, size=64, seed=4)
    assert _tree_digest(a) != _tree_digest(b)


def test_placement_containment(small_dataset):
    """Every recorded instance bbox lies fully inside its scene canvas."""
    for split in ("train", "test"):
        scenes = load_split(small_dataset, "scene", split)
        for i in range(len(scenes)):
            record = scenes.load(i)
            size = record["image"].shape[0]
            for inst in record["instances"]:
                x0, y0, x1, y1 = inst.bbox
                assert 0 <= x0 < x1 <= size
                assert 0 <= y0 < y1 <= size


def test_min_bbox_area_filter(small_dataset):
    for split in ("train", "test"):
        scenes = load_split(small_dataset, "scene", split)
        for i in range(len(scenes)):
            for inst in scenes.load(i)["instances"]:
                x0, y0, x1, y1 = inst.bbox
                assert (x1 - x0) * (y1 - y0) >= 16


def test_unknown_category_rejected(tmp_path):
    toy = ToyConfig(num_scenes=4, scene_size=64, object_size=64, seed=0)
    source = make_toy_source(toy)
    pool = make_toy_sketch_pool(toy)
    config = BuildConfig(
        foreground_categories=("circle",),  # triangle missing
        background_categories=toy.background_categories,
        scene_size=64,
        object_size=64,
        seed=0,
    )
    with pytest.raises(DataError, match="triangle"):
        build_dataset(source, pool, config, tmp_path / "out")


def test_object_records_have_both_edge_styles(small_dataset):
    objects = load_split(small_dataset, "object", "train")
    record = objects.load(0)
    assert record["image"].shape == (64, 64, 3)
    for key in ("sketch", "edge_xdog", "edge_standard"):
        assert record[key].shape == (64, 64)
    assert record["edge_xdog"].tolist() != record["edge_standard"].tolist()


def test_manifest_is_deterministic_json(small_dataset):
    text = (small_dataset / "manifest.json").read_text()
    parsed = json.loads(text)
    assert text == json.dumps(parsed, sort_keys=True, indent=2)
