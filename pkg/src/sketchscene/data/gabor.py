"""Oriented band-pass features for sketch retrieval and shape comparison.

A sketch is convolved with a bank of zero-mean Gabor kernels (orientations x
wavelengths); response magnitudes are mean-pooled over a coarse spatial grid.
A blank sketch produces the exact zero vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from ..errors import InputError
from ..images import validate_edge_image


@dataclass(frozen=True)
class GaborBank:
    orientations: int = 4
    wavelengths: tuple[float, ...] = (4.0, 8.0, 16.0)
    grid: int = 8
    aspect: float = 0.5  # ellipticity of the Gaussian envelope
    bandwidth_sigma: float = 0.56  # sigma = bandwidth_sigma * wavelength
    _kernels: list = field(default_factory=list, init=False, repr=False, compare=False)

    @property
    def feature_dim(self) -> int:
        return self.orientations * len(self.wavelengths) * self.grid * self.grid

    def kernels(self) -> list[np.ndarray]:
        if not self._kernels:
            built = []
            for wavelength in self.wavelengths:
                sigma = self.bandwidth_sigma * wavelength
                radius = max(int(np.ceil(3.0 * sigma)), 2)
                ys, xs = np.mgrid[-radius : radius + 1, -radius : radius + 1]
                for i in range(self.orientations):
                    theta = np.pi * i / self.orientations
                    xp = xs * np.cos(theta) + ys * np.sin(theta)
                    yp = -xs * np.sin(theta) + ys * np.cos(theta)
                    envelope = np.exp(
                        -(xp**2 + (self.aspect * yp) ** 2) / (2.0 * sigma**2)
                    )
                    carrier = np.cos(2.0 * np.pi * xp / wavelength)
                    kernel = envelope * carrier
                    kernel -= kernel.mean()  # zero DC: flat inputs give no response
                    norm = np.sqrt((kernel**2).sum())
                    built.append((kernel / norm).astype(np.float64))
            self._kernels.extend(built)
        return self._kernels


def _pool_grid(response: np.ndarray, grid: int) -> np.ndarray:
    h, w = response.shape
    ys = np.linspace(0, h, grid + 1).astype(int)
    xs = np.linspace(0, w, grid + 1).astype(int)
    pooled = np.empty((grid, grid), dtype=np.float64)
    for i in range(grid):
        for j in range(grid):
            cell = response[ys[i] : ys[i + 1], xs[j] : xs[j + 1]]
            pooled[i, j] = cell.mean() if cell.size else 0.0
    return pooled


def gabor_features(sketch: np.ndarray, bank: GaborBank | None = None) -> np.ndarray:
    """Fixed-length descriptor of an ink-on-white sketch."""
    bank = bank or GaborBank()
    sketch = validate_edge_image(sketch, "sketch")
    ink = (1.0 - sketch.astype(np.float64)) / 2.0  # 1 where ink, 0 on blank paper
    if not ink.any():
        return np.zeros(bank.feature_dim, dtype=np.float64)
    chunks = []
    for kernel in bank.kernels():
        response = np.abs(fftconvolve(ink, kernel, mode="same"))
        chunks.append(_pool_grid(response, bank.grid).ravel())
    return np.concatenate(chunks)


def feature_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"feature shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))
