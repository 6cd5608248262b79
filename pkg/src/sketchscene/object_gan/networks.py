"""Network definitions for the object-level adversarial model.

All modules operate on NCHW float32 tensors in [-1, 1].  Spatial sizes are
powers of two; every stack uses log2(resolution / 4) stride-2 stages so the
innermost feature map is 4x4 (4x8 for width-joined pairs).
"""

from __future__ import annotations

import math

import torch
from torch import nn

from ..errors import ConfigurationError


def _num_stages(resolution: int) -> int:
    stages = int(math.log2(resolution)) - 2
    if resolution < 16 or 2 ** (stages + 2) != resolution:
        raise ConfigurationError(
            f"resolution must be a power of two >= 16, got {resolution}"
        )
    return stages


def _stage_channels(base_width: int, stages: int) -> list[int]:
    return [min(base_width * 2**i, base_width * 8) for i in range(stages)]


def init_weights(module: nn.Module) -> None:
    """DCGAN-style initialization; applied once under the training seed."""
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
            nn.init.normal_(m.weight, 0.0, 0.02)
            if m.bias is not None:
                nn.init.zeros_(m.bias)
        elif isinstance(m, nn.InstanceNorm2d) and m.affine:
            nn.init.normal_(m.weight, 1.0, 0.02)
            nn.init.zeros_(m.bias)


class Generator(nn.Module):
    """Latent code -> image, via a linear stem and stride-2 transposed convs."""

    def __init__(
        self,
        latent_dim: int,
        out_channels: int,
        resolution: int,
        base_width: int = 64,
    ):
        super().__init__()
        stages = _num_stages(resolution)
        channels = _stage_channels(base_width, stages)[::-1]  # widest first
        self.latent_dim = latent_dim
        self.resolution = resolution
        self.stem_channels = channels[0]
        self.stem = nn.Linear(latent_dim, channels[0] * 4 * 4)
        blocks = []
        for i in range(stages - 1):
            blocks += [
                nn.ConvTranspose2d(channels[i], channels[i + 1], 4, 2, 1),
                nn.InstanceNorm2d(channels[i + 1], affine=True),
                nn.ReLU(inplace=True),
            ]
        blocks += [nn.ConvTranspose2d(channels[-1], out_channels, 4, 2, 1), nn.Tanh()]
        self.blocks = nn.Sequential(*blocks)

    def forward(self, code: torch.Tensor) -> torch.Tensor:
        if code.shape[-1] != self.latent_dim:
            raise ConfigurationError(
                f"latent code length {code.shape[-1]} != expected {self.latent_dim}"
            )
        h = self.stem(code).view(-1, self.stem_channels, 4, 4)
        return self.blocks(h)


class Critic(nn.Module):
    """Image (or width-joined pair) -> unbounded realness score.

    With ``condition_dim`` > 0 a one-hot label is concatenated to the
    flattened features before the final scoring layer.
    """

    def __init__(
        self,
        in_channels: int,
        resolution: int,
        base_width: int = 64,
        width_factor: int = 1,
        condition_dim: int = 0,
    ):
        super().__init__()
        stages = _num_stages(resolution)
        channels = _stage_channels(base_width, stages)
        self.resolution = resolution
        self.width_factor = width_factor
        self.condition_dim = condition_dim
        blocks = [nn.Conv2d(in_channels, channels[0], 4, 2, 1), nn.LeakyReLU(0.2, inplace=True)]
        for i in range(stages - 1):
            blocks += [
                nn.Conv2d(channels[i], channels[i + 1], 4, 2, 1),
                nn.InstanceNorm2d(channels[i + 1], affine=True),
                nn.LeakyReLU(0.2, inplace=True),
            ]
        self.blocks = nn.Sequential(*blocks)
        flat = channels[-1] * 4 * (4 * width_factor)
        self.score = nn.Linear(flat + condition_dim, 1)

    def forward(self, x: torch.Tensor, onehot: torch.Tensor | None = None) -> torch.Tensor:
        h = self.blocks(x).flatten(1)
        if self.condition_dim:
            if onehot is None:
                raise ConfigurationError("critic is conditioned; one-hot labels required")
            h = torch.cat([h, onehot], dim=1)
        return self.score(h).squeeze(1)


class _ResBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(channels, channels, 3, 1, 1),
            nn.InstanceNorm2d(channels, affine=True),
            nn.ReLU(inplace=True),
            nn.Conv2d(channels, channels, 3, 1, 1),
            nn.InstanceNorm2d(channels, affine=True),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.relu(x + self.body(x))


class SketchEncoder(nn.Module):
    """Edge image -> attribute vector of length noise_dim."""

    def __init__(self, noise_dim: int, resolution: int, base_width: int = 64):
        super().__init__()
        stages = _num_stages(resolution)
        channels = _stage_channels(base_width, stages)
        self.resolution = resolution
        blocks = [nn.Conv2d(1, channels[0], 4, 2, 1), nn.ReLU(inplace=True)]
        for i in range(stages - 1):
            blocks += [
                nn.Conv2d(channels[i], channels[i + 1], 4, 2, 1),
                nn.InstanceNorm2d(channels[i + 1], affine=True),
                nn.ReLU(inplace=True),
                _ResBlock(channels[i + 1]),
            ]
        self.blocks = nn.Sequential(*blocks)
        self.head = nn.Linear(channels[-1] * 4 * 4, noise_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.blocks(x).flatten(1))


class Classifier(nn.Module):
    """Color image -> category logits (softmax applied by callers)."""

    def __init__(self, num_categories: int, resolution: int, base_width: int = 64):
        super().__init__()
        stages = _num_stages(resolution)
        channels = _stage_channels(base_width, stages)
        self.resolution = resolution
        blocks = [nn.Conv2d(3, channels[0], 4, 2, 1), nn.LeakyReLU(0.2, inplace=True)]
        for i in range(stages - 1):
            blocks += [
                nn.Conv2d(channels[i], channels[i + 1], 4, 2, 1),
                nn.InstanceNorm2d(channels[i + 1], affine=True),
                nn.LeakyReLU(0.2, inplace=True),
            ]
        self.blocks = nn.Sequential(*blocks)
        self.feature_dim = channels[-1] * 4 * 4
        self.head = nn.Linear(self.feature_dim, num_categories)

    def features(self, x: torch.Tensor) -> torch.Tensor:
        """Penultimate representation, reused as an evaluation embedding."""
        return self.blocks(x).flatten(1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.features(x))
