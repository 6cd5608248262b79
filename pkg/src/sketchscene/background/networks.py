"""U-Net translator and patch-level critic for the background stage."""

from __future__ import annotations

import math

import torch
from torch import nn

from ..errors import ConfigurationError


class UNetGenerator(nn.Module):
    """4-channel conditioning -> 3-channel scene, with skip connections.

    Downsamples to a 4x4 bottleneck (log2(resolution) - 2 stages); no
    dropout, so inference is deterministic.
    """

    def __init__(self, resolution: int, in_channels: int = 4, base_width: int = 64):
        super().__init__()
        stages = int(math.log2(resolution)) - 2
        if resolution < 16 or 2 ** (stages + 2) != resolution:
            raise ConfigurationError(
                f"resolution must be a power of two >= 16, got {resolution}"
            )
        self.resolution = resolution
        widths = [min(base_width * 2**i, base_width * 8) for i in range(stages + 1)]

        self.downs = nn.ModuleList()
        for i in range(stages):
            block = [nn.Conv2d(widths[i] if i else in_channels, widths[i + 1], 4, 2, 1)]
            if i:
                block.insert(0, nn.LeakyReLU(0.2, inplace=True))
                block.append(nn.InstanceNorm2d(widths[i + 1], affine=True))
            self.downs.append(nn.Sequential(*block))

        self.ups = nn.ModuleList()
        for i in reversed(range(stages)):
            in_w = widths[i + 1] * (1 if i == stages - 1 else 2)  # skip concat
            out_w = widths[i] if i else base_width
            block = [nn.ReLU(inplace=True), nn.ConvTranspose2d(in_w, out_w, 4, 2, 1)]
            if i:
                block.append(nn.InstanceNorm2d(out_w, affine=True))
            self.ups.append(nn.Sequential(*block))
        self.head = nn.Sequential(nn.Conv2d(base_width, 3, 3, 1, 1), nn.Tanh())

    def forward(self, fused: torch.Tensor) -> torch.Tensor:
        skips = []
        h = fused
        for down in self.downs:
            h = down(h)
            skips.append(h)
        h = skips.pop()
        for up in self.ups:
            h = up(h)
            if skips:
                h = torch.cat([h, skips.pop()], dim=1)
        return self.head(h)


class PatchCritic(nn.Module):
    """Conditional patch discriminator: (conditioning, image) -> score map."""

    def __init__(self, in_channels: int = 7, base_width: int = 64):
        super().__init__()
        w = base_width
        self.body = nn.Sequential(
            nn.Conv2d(in_channels, w, 4, 2, 1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(w, w * 2, 4, 2, 1),
            nn.InstanceNorm2d(w * 2, affine=True),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(w * 2, w * 4, 4, 2, 1),
            nn.InstanceNorm2d(w * 4, affine=True),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(w * 4, 1, 4, 1, 1),
        )

    def forward(self, fused: torch.Tensor, image: torch.Tensor) -> torch.Tensor:
        return self.body(torch.cat([fused, image], dim=1))
