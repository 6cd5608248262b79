"""Background stage: input composition, networks, training, inference."""

from __future__ import annotations

import csv

import numpy as np
import pytest
import torch

from sketchscene.background.compose import BackgroundInput, compose_background_input, fuse
from sketchscene.background.inference import BackgroundModel, generate_background
from sketchscene.background.networks import PatchCritic, UNetGenerator
from sketchscene.background.train import BackgroundConfig, train_background
from sketchscene.data import load_split
from sketchscene.errors import ConfigurationError, DataError, InputError


def _blank_sketch(size):
    return np.ones((size, size), dtype=np.float32)


def _conditioning(canvas, sketch) -> BackgroundInput:
    return BackgroundInput(canvas=canvas, background_sketch=sketch, fused=fuse(canvas, sketch))


def test_fuse_stacks_canvas_and_sketch():
    canvas = np.zeros((8, 8, 3), dtype=np.float32)
    sketch = _blank_sketch(8)
    fused = fuse(canvas, sketch)
    assert fused.shape == (8, 8, 4)
    np.testing.assert_array_equal(fused[..., :3], canvas)
    np.testing.assert_array_equal(fused[..., 3], sketch)
    assert _conditioning(canvas, sketch).resolution == 8


def test_fuse_rejects_mismatched_sizes():
    with pytest.raises(InputError):
        fuse(np.zeros((8, 8, 3), dtype=np.float32), _blank_sketch(16))


def test_compose_background_input_oracle():
    """Hand-computed 8x8 case: neutral fill, two patches, later paste wins."""
    patch_a = np.full((2, 2, 3), 0.5, dtype=np.float32)
    patch_b = np.full((2, 2, 3), -0.5, dtype=np.float32)
    result = compose_background_input(
        [(patch_a, (1, 1, 3, 3)), (patch_b, (2, 2, 4, 4))],
        _blank_sketch(8),
        canvas_size=8,
        neutral_fill=0.0,
    )
    canvas = result.canvas
    assert canvas.shape == (8, 8, 3)
    assert (canvas[0] == 0.0).all()  # untouched rows keep the neutral fill
    assert (canvas[1, 1] == 0.5).all()
    assert (canvas[2, 2] == -0.5).all()  # overlap: last paste wins
    assert (canvas[3, 3] == -0.5).all()


def test_compose_background_input_resizes_patches():
    patch = np.full((4, 4, 3), 1.0, dtype=np.float32)
    result = compose_background_input([(patch, (0, 0, 2, 2))], _blank_sketch(8), canvas_size=8)
    assert (result.canvas[0:2, 0:2] == 1.0).all()
    assert (result.canvas[2:, 2:] == 0.0).all()


def test_compose_background_input_rejects_out_of_canvas():
    patch = np.zeros((2, 2, 3), dtype=np.float32)
    with pytest.raises(InputError):
        compose_background_input([(patch, (6, 6, 10, 10))], _blank_sketch(8), canvas_size=8)


def test_unet_shapes_and_determinism():
    torch.manual_seed(0)
    net = UNetGenerator(64, 4, base_width=8).eval()
    x = torch.randn(2, 4, 64, 64).clamp(-1, 1)
    with torch.no_grad():
        a = net(x)
        b = net(x)
    assert a.shape == (2, 3, 64, 64)
    assert a.abs().max() <= 1.0
    assert torch.equal(a, b), "no dropout: inference must be deterministic"


def test_patch_critic_outputs_score_map():
    critic = PatchCritic(7, base_width=8)
    fused = torch.randn(2, 4, 64, 64)
    image = torch.randn(2, 3, 64, 64)
    with torch.no_grad():
        scores = critic(fused, image)
    assert scores.ndim == 4
    assert scores.shape[0] == 2 and scores.shape[1] == 1
    assert 1 < scores.shape[2] < 64  # patch map, not a single scalar


def test_background_config_validation():
    with pytest.raises(ConfigurationError):
        BackgroundConfig(resolution=50)
    with pytest.raises(ConfigurationError):
        BackgroundConfig(epochs=-2)
    with pytest.raises(ConfigurationError):
        BackgroundConfig(l1_weight=-1.0)


def test_training_artifacts(small_background_run):
    result = small_background_run
    names = [p.name for p in result.checkpoints]
    assert names[0] == "checkpoint_epoch0000.npz"
    assert names[-1] == "checkpoint_epoch0002.npz"
    assert len(result.epoch_stats) == 2
    with result.loss_log.open() as fh:
        rows = list(csv.DictReader(fh))
    assert {"critic", "generator_adv", "l1"} <= set(rows[0])
    assert all(np.isfinite(float(v)) for row in rows for v in row.values())


def test_logged_l1_is_plain_mean_abs_error(small_background_run, small_dataset):
    """First logged l1 must equal mean|G0(input) - truth| for the initial
    generator, recomputed here from the epoch-0 checkpoint."""
    result = small_background_run
    model, _ = BackgroundModel.load(result.checkpoints[0])
    pairs = load_split(small_dataset, "background_pair", "train")
    config = model.config
    batch = next(iter(pairs.batches(config.batch_size, seed=config.seed, epoch=1)))
    outs = [
        generate_background(model, _conditioning(c, s))
        for c, s in zip(batch["canvas"], batch["background_sketch"])
    ]
    manual = float(np.mean([np.abs(o - t).mean() for o, t in zip(outs, batch["scene"])]))
    assert result.history[0]["l1"] == pytest.approx(manual, abs=1e-6)


def test_checkpoint_roundtrip(small_background_run):
    model, meta = BackgroundModel.load(small_background_run.checkpoints[-1])
    assert meta["epoch"] == 2
    fused = _conditioning(np.zeros((64, 64, 3), dtype=np.float32), _blank_sketch(64))
    a = generate_background(small_background_run.model, fused)
    b = generate_background(model, fused)
    np.testing.assert_array_equal(a, b)


def test_generate_background_contract(small_background_run):
    model = small_background_run.model
    out = generate_background(model, _conditioning(np.zeros((64, 64, 3), dtype=np.float32), _blank_sketch(64)))
    assert out.shape == (64, 64, 3)
    assert np.isfinite(out).all()
    with pytest.raises(InputError):
        generate_background(model, _conditioning(np.zeros((32, 32, 3), dtype=np.float32), _blank_sketch(32)))


def test_empty_pair_store_raises(tmp_path, small_dataset):
    pairs = load_split(small_dataset, "background_pair", "test")

    class Empty:
        def __len__(self):
            return 0

        def batches(self, *a, **k):
            return iter(())

    with pytest.raises(DataError):
        train_background(Empty(), BackgroundConfig(resolution=64, epochs=1), tmp_path)
    assert len(pairs) > 0  # the real store is fine
