"""Shared fixtures.

Two tiers: small session fixtures (a 24-scene dataset plus 1-epoch model
runs) that keep the unit tests fast, and the acceptance tier — a 700-scene
corpus with full-length object/background training — built once per session
for tests/test_acceptance.py.

Set SKETCHSCENE_TEST_CACHE=/some/dir to persist the acceptance artifacts
between local runs; without it everything lands in pytest's tmp tree.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from sketchscene.background.train import BackgroundConfig, BackgroundTrainResult, train_background
from sketchscene.data import (
    BuildConfig,
    ToyConfig,
    build_dataset,
    load_split,
    make_toy_sketch_pool,
    make_toy_source,
)
from sketchscene.metrics.extractor import ClassifierFeatureExtractor, train_eval_classifier
from sketchscene.object_gan.model import ObjectModelBundle, TrainConfig
from sketchscene.object_gan.train import TrainResult, train_object_model

ACCEPT = {
    "scenes": 700,
    "resolution": 64,
    "object_epochs": 20,
    "object_base_width": 16,
    "object_batch": 64,
    "background_epochs": 10,
    "background_base_width": 16,
    "background_batch": 16,
    "classifier_epochs": 8,
    "seed": 0,
}

_ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_lines():
    return _ACCEPTANCE_LINES


def build_toy_dataset(root: Path, scenes: int, size: int, seed: int = 0) -> dict:
    toy = ToyConfig(num_scenes=scenes, scene_size=size, object_size=size, seed=seed)
    config = BuildConfig(
        foreground_categories=toy.foreground_categories,
        background_categories=toy.background_categories,
        scene_size=size,
        object_size=size,
        seed=seed,
    )
    return build_dataset(make_toy_source(toy), make_toy_sketch_pool(toy), config, root)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("small_data")
    build_toy_dataset(root, scenes=24, size=64)
    return root


@pytest.fixture(scope="session")
def small_train_config() -> TrainConfig:
    return TrainConfig(
        num_categories=2,
        noise_dim=16,
        resolution=64,
        base_width=8,
        epochs=1,
        batch_size=16,
        checkpoint_interval=1,
        seed=0,
    )


@pytest.fixture(scope="session")
def small_object_run(tmp_path_factory, small_dataset, small_train_config) -> TrainResult:
    out = tmp_path_factory.mktemp("small_object")
    dataset = load_split(small_dataset, "object", "train")
    return train_object_model(dataset, small_train_config, out)


@pytest.fixture(scope="session")
def small_background_run(tmp_path_factory, small_dataset) -> BackgroundTrainResult:
    out = tmp_path_factory.mktemp("small_background")
    pairs = load_split(small_dataset, "background_pair", "train")
    config = BackgroundConfig(
        resolution=64, base_width=8, epochs=2, batch_size=8, checkpoint_interval=1, seed=0
    )
    return train_background(pairs, config, out)


@pytest.fixture(scope="session")
def tiny_bundle() -> ObjectModelBundle:
    """An initialized (untrained) model for shape/determinism tests."""
    config = TrainConfig(num_categories=2, noise_dim=16, resolution=64, base_width=8, epochs=0)
    return ObjectModelBundle.initialize(config, ["circle", "triangle"]).eval_mode()


# --- acceptance tier -------------------------------------------------------


@dataclass
class AcceptanceRun:
    dataset: Path
    object_dir: Path
    object_checkpoints: list[Path]
    object_epoch_stats: list[dict]
    background_dir: Path
    background_checkpoints: list[Path]
    classifier: ClassifierFeatureExtractor


def _epoch_means(loss_log: Path) -> list[dict]:
    rows: dict[int, list[dict]] = {}
    with loss_log.open() as fh:
        for row in csv.DictReader(fh):
            epoch = int(row.pop("epoch"))
            row.pop("step")
            rows.setdefault(epoch, []).append({k: float(v) for k, v in row.items()})
    return [
        {"epoch": epoch, **{k: float(np.mean([r[k] for r in batch])) for k in batch[0]}}
        for epoch, batch in sorted(rows.items())
    ]


@pytest.fixture(scope="session")
def acceptance_run(tmp_path_factory) -> AcceptanceRun:
    cache = os.environ.get("SKETCHSCENE_TEST_CACHE")
    root = Path(cache) if cache else tmp_path_factory.mktemp("acceptance")
    root.mkdir(parents=True, exist_ok=True)
    size = ACCEPT["resolution"]

    dataset = root / "data"
    if not (dataset / "manifest.json").is_file():
        build_toy_dataset(dataset, scenes=ACCEPT["scenes"], size=size, seed=ACCEPT["seed"])

    object_dir = root / "object"
    final_object = object_dir / f"checkpoint_epoch{ACCEPT['object_epochs']:04d}.npz"
    if not final_object.is_file():
        config = TrainConfig(
            num_categories=2,
            resolution=size,
            base_width=ACCEPT["object_base_width"],
            epochs=ACCEPT["object_epochs"],
            batch_size=ACCEPT["object_batch"],
            checkpoint_interval=1,
            seed=ACCEPT["seed"],
        )
        train_object_model(load_split(dataset, "object", "train"), config, object_dir)

    background_dir = root / "background"
    final_background = background_dir / f"checkpoint_epoch{ACCEPT['background_epochs']:04d}.npz"
    if not final_background.is_file():
        config = BackgroundConfig(
            resolution=size,
            base_width=ACCEPT["background_base_width"],
            epochs=ACCEPT["background_epochs"],
            batch_size=ACCEPT["background_batch"],
            checkpoint_interval=1,
            seed=ACCEPT["seed"],
        )
        train_background(load_split(dataset, "background_pair", "train"), config, background_dir)

    classifier = train_eval_classifier(
        load_split(dataset, "object", "train"),
        resolution=size,
        base_width=16,
        epochs=ACCEPT["classifier_epochs"],
        seed=ACCEPT["seed"],
    )
    return AcceptanceRun(
        dataset=dataset,
        object_dir=object_dir,
        object_checkpoints=sorted(object_dir.glob("checkpoint_epoch*.npz")),
        object_epoch_stats=_epoch_means(object_dir / "losses.csv"),
        background_dir=background_dir,
        background_checkpoints=sorted(background_dir.glob("checkpoint_epoch*.npz")),
        classifier=classifier,
    )
