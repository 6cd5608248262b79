"""Inference entry points for a trained object model (numpy in, numpy out)."""

from __future__ import annotations

import numpy as np
import torch

from ..errors import InputError
from ..latent import LatentCode, one_hot
from .losses import from_batch_tensor, to_batch_tensor
from .model import ObjectModelBundle


def _check_code(bundle: ObjectModelBundle, code: LatentCode) -> None:
    config = bundle.config
    if code.noise_dim != config.noise_dim or code.num_categories != config.num_categories:
        raise InputError(
            f"latent code ({code.noise_dim} noise, {code.num_categories} categories) does not "
            f"match model ({config.noise_dim} noise, {config.num_categories} categories)"
        )


def _check_resolution(bundle: ObjectModelBundle, pixels: np.ndarray, channels: int) -> None:
    r = bundle.config.resolution
    expected = (r, r) if channels == 1 else (r, r, channels)
    if pixels.shape != expected:
        raise InputError(f"expected image of shape {expected}, got {pixels.shape}")


def generate_edge(bundle: ObjectModelBundle, code: LatentCode) -> np.ndarray:
    """Edge image in [-1, 1] for one latent code; deterministic."""
    _check_code(bundle, code)
    with torch.no_grad():
        out = bundle.edge_generator(torch.from_numpy(code.concat()[None]))
    return from_batch_tensor(out)[0]


def generate_image(bundle: ObjectModelBundle, code: LatentCode) -> np.ndarray:
    """Color image in [-1, 1] for one latent code; deterministic."""
    _check_code(bundle, code)
    with torch.no_grad():
        out = bundle.image_generator(torch.from_numpy(code.concat()[None]))
    return from_batch_tensor(out)[0]


def generate_image_batch(bundle: ObjectModelBundle, codes: list[LatentCode]) -> np.ndarray:
    for code in codes:
        _check_code(bundle, code)
    with torch.no_grad():
        out = bundle.image_generator(
            torch.from_numpy(np.stack([c.concat() for c in codes]))
        )
    return from_batch_tensor(out)


def encode_sketch(bundle: ObjectModelBundle, sketch: np.ndarray) -> np.ndarray:
    """Sketch/edge image -> attribute vector of length noise_dim."""
    sketch = np.asarray(sketch, dtype=np.float32)
    _check_resolution(bundle, sketch, 1)
    with torch.no_grad():
        vec = bundle.encoder(to_batch_tensor(sketch))
    return vec.numpy()[0]


def classify_image(bundle: ObjectModelBundle, image: np.ndarray) -> np.ndarray:
    """Color image -> category probability vector (sums to 1)."""
    image = np.asarray(image, dtype=np.float32)
    _check_resolution(bundle, image, 3)
    with torch.no_grad():
        logits = bundle.classifier(to_batch_tensor(image))
    return torch.softmax(logits, dim=1).numpy()[0]


def infer_object(
    bundle: ObjectModelBundle, sketch: np.ndarray, category_index: int
) -> np.ndarray:
    """Freehand sketch + category -> color image.

    The sketch is summarized into an attribute vector, paired with the
    requested one-hot, and decoded by the image generator.
    """
    if not 0 <= category_index < bundle.config.num_categories:
        raise InputError(
            f"category_index {category_index} out of range [0, {bundle.config.num_categories})"
        )
    attr = encode_sketch(bundle, sketch)
    code = LatentCode(
        noise=attr.astype(np.float32),
        onehot=one_hot(bundle.config.num_categories, category_index),
    )
    return generate_image(bundle, code)
