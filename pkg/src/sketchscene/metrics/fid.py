"""Frechet distance between Gaussian fits of two feature sets."""

from __future__ import annotations

import numpy as np

from ..errors import InputError

_EIG_FLOOR = 1e-10


def _validate_features(feats: np.ndarray, name: str) -> np.ndarray:
    feats = np.asarray(feats, dtype=np.float64)
    if feats.ndim != 2:
        raise InputError(f"{name} must be a 2-d (N, D) array, got shape {feats.shape}")
    if feats.shape[0] < 2:
        raise InputError(f"{name} needs at least 2 rows, got {feats.shape[0]}")
    if not np.isfinite(feats).all():
        raise InputError(f"{name} contains non-finite values")
    return feats


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    """Symmetric square root; eigenvalue noise below the floor is clipped to 0."""
    sym = (mat + mat.T) / 2.0
    evals, evecs = np.linalg.eigh(sym)
    evals = np.where(evals < _EIG_FLOOR, 0.0, evals)
    return (evecs * np.sqrt(evals)) @ evecs.T


def fid(features_real: np.ndarray, features_fake: np.ndarray) -> float:
    """||mu_r - mu_f||^2 + Tr(S_r + S_f - 2 (S_r S_f)^(1/2)).

    The cross term is evaluated through the symmetric product
    sqrt(S_r)^T S_f sqrt(S_r), whose eigenvalues are the same as those of
    S_r S_f but stay real.  Covariances use the N-1 normalization.
    """
    real = _validate_features(features_real, "features_real")
    fake = _validate_features(features_fake, "features_fake")
    if real.shape[1] != fake.shape[1]:
        raise InputError(
            f"feature dims differ: {real.shape[1]} vs {fake.shape[1]}"
        )

    mu_r = real.mean(axis=0)
    mu_f = fake.mean(axis=0)
    cov_r = np.atleast_2d(np.cov(real, rowvar=False))
    cov_f = np.atleast_2d(np.cov(fake, rowvar=False))

    sqrt_r = _sqrt_psd(cov_r)
    cross = sqrt_r @ cov_f @ sqrt_r
    cross_evals, _ = np.linalg.eigh((cross + cross.T) / 2.0)
    cross_evals = np.where(cross_evals < _EIG_FLOOR, 0.0, cross_evals)
    trace_sqrt_cross = float(np.sum(np.sqrt(cross_evals)))

    diff = mu_r - mu_f
    value = float(diff @ diff + np.trace(cov_r) + np.trace(cov_f) - 2.0 * trace_sqrt_cross)
    return max(value, 0.0)
