"""Conditional translation training for the background stage."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from ..errors import ConfigurationError, DataError, TrainingDiverged
from ..object_gan.losses import scalar, to_batch_tensor
from ..object_gan.networks import init_weights
from .inference import BackgroundModel
from .networks import PatchCritic, UNetGenerator


@dataclass(frozen=True)
class BackgroundConfig:
    resolution: int = 128
    base_width: int = 64
    learning_rate: float = 2e-4
    beta1: float = 0.5
    l1_weight: float = 100.0
    epochs: int = 40
    batch_size: int = 16
    neutral_fill: float = 0.0
    checkpoint_interval: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.resolution < 16 or self.resolution & (self.resolution - 1):
            raise ConfigurationError(
                f"resolution must be a power of two >= 16, got {self.resolution}"
            )
        if self.epochs < 0:
            raise ConfigurationError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.l1_weight < 0:
            raise ConfigurationError("l1_weight must be >= 0")
        if self.checkpoint_interval < 1:
            raise ConfigurationError("checkpoint_interval must be >= 1")


@dataclass
class BackgroundTrainResult:
    model: BackgroundModel
    checkpoints: list[Path]
    loss_log: Path
    history: list[dict]
    epoch_stats: list[dict]


_FIELDS = ("critic", "generator_adv", "l1")


def _fuse_batch(batch: dict, resolution: int) -> tuple[torch.Tensor, torch.Tensor]:
    canvas = np.asarray(batch["canvas"], dtype=np.float32)
    sketch = np.asarray(batch["background_sketch"], dtype=np.float32)
    scene = np.asarray(batch["scene"], dtype=np.float32)
    if canvas.shape[1:3] != (resolution, resolution) or scene.shape[1:3] != (
        resolution,
        resolution,
    ):
        raise DataError(
            f"pair resolution {canvas.shape[1:3]} does not match configured {resolution}"
        )
    fused = np.concatenate([canvas, sketch[..., None]], axis=3)
    return to_batch_tensor(fused), to_batch_tensor(scene)


def train_background(pairs, config: BackgroundConfig, out_dir: str | Path) -> BackgroundTrainResult:
    """Adversarial + weighted-L1 training of the scene translator.

    The logged ``l1`` column is the plain mean absolute difference between
    output and ground truth (the objective weighs it by l1_weight), so it
    can be recomputed directly from the tensors.
    """
    if len(pairs) == 0:
        raise DataError("empty background pair store")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    torch.manual_seed(config.seed)
    generator = UNetGenerator(config.resolution, 4, config.base_width)
    critic = PatchCritic(7, config.base_width)
    init_weights(generator)
    init_weights(critic)
    model = BackgroundModel(config=config, generator=generator, critic=critic)

    opt_g = torch.optim.Adam(
        generator.parameters(), lr=config.learning_rate, betas=(config.beta1, 0.999)
    )
    opt_d = torch.optim.Adam(
        critic.parameters(), lr=config.learning_rate, betas=(config.beta1, 0.999)
    )

    loss_log = out_dir / "losses.csv"
    history: list[dict] = []
    epoch_stats: list[dict] = []
    checkpoints: list[Path] = []

    def save(tag_epoch: int, meta_extra: dict | None = None) -> Path:
        meta = {"epoch": tag_epoch}
        meta.update(meta_extra or {})
        path = out_dir / f"checkpoint_epoch{tag_epoch:04d}.npz"
        model.save(path, meta)
        checkpoints.append(path)
        return path

    save(0)
    with loss_log.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("epoch", "step") + _FIELDS)
        for epoch in range(1, config.epochs + 1):
            rows = []
            for step, batch in enumerate(
                pairs.batches(config.batch_size, seed=config.seed, epoch=epoch)
            ):
                fused, real = _fuse_batch(batch, config.resolution)
                fake = generator(fused)

                real_scores = critic(fused, real)
                fake_scores = critic(fused, fake.detach())
                d_loss = F.binary_cross_entropy_with_logits(
                    real_scores, torch.ones_like(real_scores)
                ) + F.binary_cross_entropy_with_logits(
                    fake_scores, torch.zeros_like(fake_scores)
                )
                opt_d.zero_grad(set_to_none=True)
                d_loss.backward()
                opt_d.step()

                fake_scores = critic(fused, fake)
                g_adv = F.binary_cross_entropy_with_logits(
                    fake_scores, torch.ones_like(fake_scores)
                )
                l1 = (fake - real).abs().mean()
                opt_g.zero_grad(set_to_none=True)
                (g_adv + config.l1_weight * l1).backward()
                opt_g.step()

                row = {
                    "epoch": epoch,
                    "step": step,
                    "critic": scalar(d_loss),
                    "generator_adv": scalar(g_adv),
                    "l1": scalar(l1),
                }
                if not all(np.isfinite(v) for v in row.values()):
                    path = save(epoch, {"diverged_at_step": step})
                    raise TrainingDiverged(
                        f"non-finite loss at epoch {epoch} step {step}", checkpoint_path=path
                    )
                writer.writerow([row[k] for k in ("epoch", "step") + _FIELDS])
                history.append(row)
                rows.append(row)
            stats = {"epoch": epoch}
            for key in _FIELDS:
                stats[key] = float(np.mean([r[key] for r in rows]))
            epoch_stats.append(stats)
            if epoch % config.checkpoint_interval == 0 and epoch != config.epochs:
                save(epoch)
        if config.epochs > 0:
            save(config.epochs)

    generator.eval()
    critic.eval()
    return BackgroundTrainResult(
        model=model,
        checkpoints=checkpoints,
        loss_log=loss_log,
        history=history,
        epoch_stats=epoch_stats,
    )
