"""Latent codes: a Gaussian noise vector plus a one-hot category vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class LatentCode:
    """Shared input of the edge and image generators."""

    noise: np.ndarray  # (noise_dim,) float32, N(0, 1) at sampling time
    onehot: np.ndarray  # (num_categories,) float32, exactly one entry = 1

    @property
    def noise_dim(self) -> int:
        return int(self.noise.shape[0])

    @property
    def num_categories(self) -> int:
        return int(self.onehot.shape[0])

    @property
    def category_index(self) -> int:
        return int(np.argmax(self.onehot))

    def concat(self) -> np.ndarray:
        return np.concatenate([self.noise, self.onehot]).astype(np.float32)


def one_hot(num_categories: int, category_index: int) -> np.ndarray:
    if num_categories <= 0:
        raise InputError(f"num_categories must be positive, got {num_categories}")
    if not 0 <= category_index < num_categories:
        raise InputError(
            f"category_index {category_index} out of range [0, {num_categories})"
        )
    vec = np.zeros(num_categories, dtype=np.float32)
    vec[category_index] = 1.0
    return vec


def sample_latent(
    num_categories: int,
    category_index: int,
    noise_dim: int,
    rng: np.random.Generator,
) -> LatentCode:
    """Draw a latent code: i.i.d. standard-normal noise and the requested one-hot."""
    if noise_dim <= 0:
        raise InputError(f"noise_dim must be positive, got {noise_dim}")
    onehot = one_hot(num_categories, category_index)
    noise = rng.standard_normal(noise_dim).astype(np.float32)
    return LatentCode(noise=noise, onehot=onehot)


def sample_latent_batch(
    num_categories: int,
    category_indices: np.ndarray,
    noise_dim: int,
    rng: np.random.Generator,
) -> list[LatentCode]:
    return [
        sample_latent(num_categories, int(idx), noise_dim, rng)
        for idx in np.asarray(category_indices).ravel()
    ]
