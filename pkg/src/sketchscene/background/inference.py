"""Loading and running the trained background translator."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .. import checkpoint as ckpt
from ..errors import InputError
from ..object_gan.losses import from_batch_tensor, to_batch_tensor
from .compose import BackgroundInput
from .networks import PatchCritic, UNetGenerator


@dataclass
class BackgroundModel:
    config: "BackgroundConfig"  # noqa: F821 - forward ref, defined in .train
    generator: UNetGenerator
    critic: PatchCritic

    def save(self, path: str | Path, meta: dict | None = None) -> Path:
        arrays = {}
        for name, module in (("generator", self.generator), ("critic", self.critic)):
            for key, value in module.state_dict().items():
                arrays[f"{name}.{key}"] = value.detach().cpu().numpy()
        return ckpt.save_checkpoint(path, arrays, {"background": asdict(self.config)}, meta or {})

    @classmethod
    def load(cls, path: str | Path) -> tuple["BackgroundModel", dict]:
        from .train import BackgroundConfig

        arrays, config, meta = ckpt.load_checkpoint(path)
        cfg = BackgroundConfig(**config["background"])
        torch.manual_seed(cfg.seed)
        model = cls(
            config=cfg,
            generator=UNetGenerator(cfg.resolution, 4, cfg.base_width),
            critic=PatchCritic(7, cfg.base_width),
        )
        for name, module in (("generator", model.generator), ("critic", model.critic)):
            prefix = f"{name}."
            state = {
                key[len(prefix):]: torch.from_numpy(np.asarray(value))
                for key, value in arrays.items()
                if key.startswith(prefix)
            }
            module.load_state_dict(state, strict=True)
            module.eval()
        return model, meta


def generate_background(model: BackgroundModel, background_input: BackgroundInput) -> np.ndarray:
    """Full scene in [-1, 1] from one conditioning input; deterministic."""
    if background_input.resolution != model.config.resolution:
        raise InputError(
            f"input resolution {background_input.resolution} != model resolution "
            f"{model.config.resolution}"
        )
    with torch.no_grad():
        out = model.generator(to_batch_tensor(background_input.fused[None]))
    return from_batch_tensor(out)[0]
