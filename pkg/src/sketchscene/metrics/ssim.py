"""Structural similarity with the standard 11x11 Gaussian window."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from ..errors import InputError

_SIGMA = 1.5
_TRUNCATE = 3.5  # radius 5 -> 11-tap window
_K1 = 0.01
_K2 = 0.03
_DATA_RANGE = 2.0  # images live in [-1, 1]


def _ssim_single(a: np.ndarray, b: np.ndarray) -> float:
    radius = int(_TRUNCATE * _SIGMA + 0.5)
    win = 2 * radius + 1
    if min(a.shape) < win:
        raise InputError(f"images must be at least {win}x{win} for SSIM")

    blur = lambda x: gaussian_filter(x, sigma=_SIGMA, truncate=_TRUNCATE, mode="reflect")
    ux = blur(a)
    uy = blur(b)
    uxx = blur(a * a)
    uyy = blur(b * b)
    uxy = blur(a * b)
    vx = uxx - ux * ux
    vy = uyy - uy * uy
    vxy = uxy - ux * uy

    c1 = (_K1 * _DATA_RANGE) ** 2
    c2 = (_K2 * _DATA_RANGE) ** 2
    s = ((2 * ux * uy + c1) * (2 * vxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))

    pad = (win - 1) // 2
    interior = s[pad:-pad, pad:-pad]
    return float(interior.mean(dtype=np.float64))


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM between two images in [-1, 1]; channels are averaged."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 2:
        return _ssim_single(a, b)
    if a.ndim == 3:
        vals = [_ssim_single(a[:, :, c], b[:, :, c]) for c in range(a.shape[2])]
        return float(np.mean(vals))
    raise InputError(f"expected 2-d or 3-d image arrays, got shape {a.shape}")
