from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sketchscene.errors import InputError
from sketchscene.images import (
    decode_png_bytes,
    encode_png_bytes,
    from_uint8,
    join_width,
    quantize,
    read_png,
    resize,
    to_grayscale,
    to_uint8,
    validate_color_image,
    validate_edge_image,
    write_png,
)


def _random_color(rng, size=8):
    return rng.uniform(-1, 1, size=(size, size, 3)).astype(np.float32)


def test_png_roundtrip_color(tmp_path):
    rng = np.random.default_rng(0)
    img = quantize(_random_color(rng))
    path = tmp_path / "img.png"
    write_png(path, img)
    back = read_png(path, channels=3)
    assert back.shape == img.shape
    np.testing.assert_allclose(back, img, atol=1 / 255)


def test_png_roundtrip_grayscale(tmp_path):
    rng = np.random.default_rng(1)
    edge = quantize(rng.uniform(-1, 1, size=(8, 8)).astype(np.float32))
    path = tmp_path / "edge.png"
    write_png(path, edge)
    back = read_png(path, channels=1)
    assert back.ndim == 2
    np.testing.assert_allclose(back, edge, atol=1 / 255)


def test_encode_decode_bytes_match_file(tmp_path):
    img = quantize(_random_color(np.random.default_rng(2)))
    raw = encode_png_bytes(img)
    path = tmp_path / "img.png"
    write_png(path, img)
    assert raw == path.read_bytes()
    np.testing.assert_array_equal(decode_png_bytes(raw, channels=3), read_png(path, channels=3))


@given(st.integers(0, 255))
def test_uint8_roundtrip_is_exact(value):
    arr = np.full((2, 2), value, dtype=np.uint8)
    assert to_uint8(from_uint8(arr)).tolist() == arr.tolist()


def test_quantize_idempotent():
    img = _random_color(np.random.default_rng(3))
    once = quantize(img)
    np.testing.assert_array_equal(quantize(once), once)


def test_resize_shapes_and_identity():
    img = _random_color(np.random.default_rng(4), size=16)
    up = resize(img, 32, 32)
    assert up.shape == (32, 32, 3)
    same = resize(img, 16, 16)
    np.testing.assert_allclose(same, img, atol=1 / 255)
    gray = resize(img[..., 0], 8, 8)
    assert gray.shape == (8, 8)


def test_to_grayscale_range():
    img = _random_color(np.random.default_rng(5))
    gray = to_grayscale(img)
    assert gray.shape == img.shape[:2]
    assert gray.min() >= -1.0 - 1e-6 and gray.max() <= 1.0 + 1e-6


def test_join_width_layout():
    edge = np.zeros((4, 4), dtype=np.float32)
    image = np.ones((4, 4, 3), dtype=np.float32)
    joined = join_width(edge, image)
    assert joined.shape == (4, 8, 3)
    # left half is the edge replicated across channels, right half the image
    np.testing.assert_array_equal(joined[:, :4, 0], edge)
    np.testing.assert_array_equal(joined[:, 4:], image)


@pytest.mark.parametrize(
    "bad",
    [np.zeros((4, 4, 3)), np.zeros((4,)), 2.0 * np.ones((4, 4))],
)
def test_validate_edge_image_rejects(bad):
    with pytest.raises(InputError):
        validate_edge_image(np.asarray(bad, dtype=np.float32))


def test_validate_color_image_rejects_wrong_channels():
    with pytest.raises(InputError):
        validate_color_image(np.zeros((4, 4, 2), dtype=np.float32))


def test_read_png_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_png(tmp_path / "absent.png")
