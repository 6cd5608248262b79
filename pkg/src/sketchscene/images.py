"""Image conventions and PNG IO.

Every image in this package is a float32 numpy array with values in [-1, 1]:

* edge maps / sketches: shape (H, W), ink is dark (-1), blank paper is +1
* color images: shape (H, W, 3)

PNGs are 8-bit and map linearly: 0 -> -1.0, 255 -> +1.0.  Arrays that have
been through ``quantize`` (or read from a PNG) round-trip bit-exactly.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InputError

NO_EDGE = 1.0  # blank-paper value of an edge map
INK = -1.0


def validate_edge_image(arr: np.ndarray, name: str = "edge image") -> np.ndarray:
    arr = np.asarray(arr)
    if arr.ndim != 2:
        raise InputError(f"{name} must be a 2-d (H, W) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InputError(f"{name} contains non-finite values")
    if arr.min() < -1.0 - 1e-6 or arr.max() > 1.0 + 1e-6:
        raise InputError(f"{name} values must lie in [-1, 1]")
    return arr.astype(np.float32, copy=False)


def validate_color_image(arr: np.ndarray, name: str = "color image") -> np.ndarray:
    arr = np.asarray(arr)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InputError(f"{name} must be a (H, W, 3) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InputError(f"{name} contains non-finite values")
    if arr.min() < -1.0 - 1e-6 or arr.max() > 1.0 + 1e-6:
        raise InputError(f"{name} values must lie in [-1, 1]")
    return arr.astype(np.float32, copy=False)


def to_uint8(arr: np.ndarray) -> np.ndarray:
    """Map [-1, 1] floats to uint8 [0, 255]."""
    clipped = np.clip(arr, -1.0, 1.0)
    return np.round((clipped + 1.0) * 127.5).astype(np.uint8)


def from_uint8(arr: np.ndarray) -> np.ndarray:
    """Map uint8 [0, 255] back to float32 [-1, 1]."""
    return (arr.astype(np.float32) / 127.5) - 1.0


def quantize(arr: np.ndarray) -> np.ndarray:
    """Snap values to the 8-bit grid used by PNG storage."""
    return from_uint8(to_uint8(arr))


def write_png(path: str | Path, arr: np.ndarray) -> None:
    arr = np.asarray(arr)
    data = to_uint8(arr)
    mode = "L" if data.ndim == 2 else "RGB"
    Image.fromarray(data, mode=mode).save(Path(path), format="PNG")


def read_png(path: str | Path, channels: int | None = None) -> np.ndarray:
    """Read a PNG into [-1, 1] floats.  channels=1 forces grayscale, 3 forces RGB."""
    with Image.open(Path(path)) as img:
        if channels == 1:
            img = img.convert("L")
        elif channels == 3:
            img = img.convert("RGB")
        data = np.asarray(img)
    return from_uint8(data)


def encode_png_bytes(arr: np.ndarray) -> bytes:
    data = to_uint8(np.asarray(arr))
    mode = "L" if data.ndim == 2 else "RGB"
    buf = io.BytesIO()
    Image.fromarray(data, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def decode_png_bytes(raw: bytes, channels: int | None = None) -> np.ndarray:
    try:
        img = Image.open(io.BytesIO(raw))
        img.load()
    except Exception as exc:
        raise InputError(f"payload is not a decodable PNG: {exc}") from exc
    if channels == 1:
        img = img.convert("L")
    elif channels == 3:
        img = img.convert("RGB")
    return from_uint8(np.asarray(img))


def resize(arr: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize preserving the [-1, 1] range."""
    if height <= 0 or width <= 0:
        raise InputError(f"resize target must be positive, got {height}x{width}")
    arr = np.asarray(arr, dtype=np.float32)
    if arr.shape[:2] == (height, width):
        return arr.copy()
    shifted = (np.clip(arr, -1.0, 1.0) + 1.0) * 127.5
    if arr.ndim == 2:
        img = Image.fromarray(shifted.astype(np.float32), mode="F")
        out = np.asarray(img.resize((width, height), Image.BILINEAR))
    else:
        planes = [
            np.asarray(
                Image.fromarray(shifted[:, :, c].astype(np.float32), mode="F").resize(
                    (width, height), Image.BILINEAR
                )
            )
            for c in range(arr.shape[2])
        ]
        out = np.stack(planes, axis=2)
    return np.clip(out / 127.5 - 1.0, -1.0, 1.0).astype(np.float32)


def to_grayscale(color: np.ndarray) -> np.ndarray:
    """Luminance of a (H, W, 3) image, still in [-1, 1]."""
    color = np.asarray(color, dtype=np.float32)
    if color.ndim == 2:
        return color
    return (
        0.299 * color[:, :, 0] + 0.587 * color[:, :, 1] + 0.114 * color[:, :, 2]
    ).astype(np.float32)


def join_width(edge: np.ndarray, image: np.ndarray) -> np.ndarray:
    """Side-by-side composite: grayscale edge replicated to 3 channels, then the image.

    Result shape (H, 2W, 3); this is the joint-critic input layout.
    """
    edge = validate_edge_image(edge)
    image = validate_color_image(image)
    if edge.shape != image.shape[:2]:
        raise InputError(
            f"edge {edge.shape} and image {image.shape[:2]} resolutions differ"
        )
    edge3 = np.repeat(edge[:, :, None], 3, axis=2)
    return np.concatenate([edge3, image], axis=1)
