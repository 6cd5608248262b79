"""Procedural toy corpus: colored shapes on textured sky/ground scenes.

Foreground categories are flat-colored shapes (warm circles, cool
triangles); background categories are region textures (striped ground,
dotted sky).  A matching pseudo-freehand sketch pool is synthesized with
jittered outlines so retrieval and inference have realistic, varied line
drawings to work with.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, ImageDraw
from scipy.ndimage import binary_erosion

from ..errors import InputError
from ..images import from_uint8, quantize
from .gabor import GaborBank
from .records import InstanceAnnotation, SourceScene
from .retrieval import SketchPool

FOREGROUND_SHAPES = ("circle", "triangle", "square")
BACKGROUND_TEXTURES = ("stripes", "dots")


@dataclass(frozen=True)
class ToyConfig:
    foreground_categories: tuple[str, ...] = ("circle", "triangle")
    background_categories: tuple[str, ...] = ("stripes", "dots")
    scene_size: int = 128
    object_size: int = 64
    num_scenes: int = 60
    max_instances: int = 3
    pool_per_foreground: int = 48
    pool_per_background: int = 24
    seed: int = 0

    def __post_init__(self):
        unknown_fg = set(self.foreground_categories) - set(FOREGROUND_SHAPES)
        unknown_bg = set(self.background_categories) - set(BACKGROUND_TEXTURES)
        if unknown_fg or unknown_bg:
            raise InputError(
                f"unknown toy categories: {sorted(unknown_fg | unknown_bg)}"
            )


def _hsv(h: float, s: float, v: float) -> np.ndarray:
    rgb = np.array(colorsys.hsv_to_rgb(h % 1.0, s, v), dtype=np.float32)
    return rgb * 2.0 - 1.0


def _category_color(category: str, rng: np.random.Generator) -> np.ndarray:
    if category == "circle":  # warm
        return _hsv(rng.uniform(-0.02, 0.09), rng.uniform(0.8, 0.95), rng.uniform(0.75, 0.95))
    if category == "triangle":  # cool
        return _hsv(rng.uniform(0.55, 0.66), rng.uniform(0.8, 0.95), rng.uniform(0.75, 0.95))
    return _hsv(rng.uniform(0.76, 0.84), rng.uniform(0.8, 0.95), rng.uniform(0.75, 0.95))


def _shape_mask(category: str, size: int, cx: float, cy: float, r: float) -> np.ndarray:
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    if category == "circle":
        return (xs - cx) ** 2 + (ys - cy) ** 2 <= r**2
    if category == "triangle":
        top = (cx, cy - r)
        left = (cx - 0.9 * r, cy + 0.75 * r)
        right = (cx + 0.9 * r, cy + 0.75 * r)
        def half_plane(p, q):
            return (q[0] - p[0]) * (ys - p[1]) - (q[1] - p[1]) * (xs - p[0])
        s1 = half_plane(top, left)
        s2 = half_plane(left, right)
        s3 = half_plane(right, top)
        return (s1 <= 0) & (s2 <= 0) & (s3 <= 0)
    half = 0.8 * r
    return (np.abs(xs - cx) <= half) & (np.abs(ys - cy) <= half)


def _sky_ground(size: int, horizon: int, rng: np.random.Generator) -> np.ndarray:
    scene = np.empty((size, size, 3), dtype=np.float32)
    sky = _hsv(rng.uniform(0.55, 0.60), rng.uniform(0.25, 0.4), rng.uniform(0.85, 0.97))
    scene[:horizon] = sky
    # dotted sky: a few lighter cloud blobs
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    for _ in range(rng.integers(2, 5)):
        cx = rng.uniform(10, size - 10)
        cy = rng.uniform(4, max(horizon - 8, 5))
        rx = rng.uniform(8, 18)
        ry = rx * rng.uniform(0.4, 0.6)
        blob = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
        blob &= ys < horizon
        scene[blob] = np.clip(scene[blob] + 0.25, -1.0, 1.0)
    # striped ground: alternating horizontal green bands
    g1 = _hsv(rng.uniform(0.26, 0.32), rng.uniform(0.55, 0.7), rng.uniform(0.45, 0.6))
    g2 = g1 * 0.7 - 0.08
    band = int(rng.integers(4, 8))
    for y in range(horizon, size):
        scene[y] = g1 if ((y - horizon) // band) % 2 == 0 else g2
    return scene


def _paint_instance(
    scene: np.ndarray, category: str, mask: np.ndarray, rng: np.random.Generator
) -> None:
    color = _category_color(category, rng)
    scene[mask] = color
    interior = binary_erosion(mask, iterations=2)
    rim = mask & ~interior
    scene[rim] = np.clip(color * 0.5 - 0.25, -1.0, 1.0)


def make_toy_source(config: ToyConfig) -> list[SourceScene]:
    """Generate the procedural scene corpus (deterministic under config.seed)."""
    rng = np.random.default_rng(config.seed)
    size = config.scene_size
    scenes = []
    for scene_idx in range(config.num_scenes):
        scene_rng = np.random.default_rng([config.seed, 101, scene_idx])
        horizon = int(size * scene_rng.uniform(0.42, 0.6))
        scene = _sky_ground(size, horizon, scene_rng)

        instances: list[InstanceAnnotation] = []
        occupied = np.zeros((size, size), dtype=bool)
        n_instances = int(scene_rng.integers(1, config.max_instances + 1))
        for i in range(n_instances):
            category = config.foreground_categories[
                int(scene_rng.integers(len(config.foreground_categories)))
            ]
            for _attempt in range(12):
                r = scene_rng.uniform(size * 0.11, size * 0.21)
                cx = scene_rng.uniform(r + 2, size - r - 2)
                cy = scene_rng.uniform(max(r + 2, horizon * 0.6), size - r - 2)
                mask = _shape_mask(category, size, cx, cy, r)
                if not mask.any():
                    continue
                if (mask & occupied).sum() <= 0.05 * mask.sum():
                    break
            else:
                continue
            occupied |= mask
            _paint_instance(scene, category, mask, scene_rng)
            ys, xs = np.nonzero(mask)
            bbox = (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
            instances.append(InstanceAnnotation(category=category, bbox=bbox, mask=mask))

        regions = {}
        free = ~occupied
        if "dots" in config.background_categories:
            sky_mask = np.zeros((size, size), dtype=bool)
            sky_mask[:horizon] = True
            regions["dots"] = sky_mask & free
        if "stripes" in config.background_categories:
            ground_mask = np.zeros((size, size), dtype=bool)
            ground_mask[horizon:] = True
            regions["stripes"] = ground_mask & free

        scenes.append(
            SourceScene(
                image=quantize(np.clip(scene, -1.0, 1.0)),
                instances=instances,
                background_regions=regions,
            )
        )
    return scenes


# ---------------------------------------------------------------------------
# sketch synthesis


def _draw_polyline(draw: ImageDraw.ImageDraw, pts: np.ndarray, width: int) -> None:
    draw.line([(float(x), float(y)) for x, y in pts], fill=0, width=width, joint="curve")


def _wobbly_ring(
    rng: np.random.Generator, center: float, radius: float, n: int = 28, squash: float = 1.0
) -> np.ndarray:
    thetas = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False) + rng.uniform(0, np.pi)
    radii = radius * (1.0 + rng.normal(0.0, 0.06, size=n))
    xs = center + radii * np.cos(thetas)
    ys = center + squash * radii * np.sin(thetas)
    pts = np.stack([xs, ys], axis=1)
    return np.vstack([pts, pts[:1]])


def _sketch_canvas(size: int) -> tuple[Image.Image, ImageDraw.ImageDraw]:
    img = Image.new("L", (size, size), 255)
    return img, ImageDraw.Draw(img)


def _synth_sketch(category: str, size: int, rng: np.random.Generator) -> np.ndarray:
    img, draw = _sketch_canvas(size)
    c = size / 2.0
    width = int(rng.integers(1, 3))
    if category == "circle":
        _draw_polyline(draw, _wobbly_ring(rng, c, rng.uniform(0.28, 0.42) * size), width)
    elif category == "triangle":
        r = rng.uniform(0.3, 0.44) * size
        angles = np.array([-np.pi / 2, np.pi / 6 + np.pi / 2, np.pi - np.pi / 6 - np.pi / 2])
        verts = np.stack([c + r * np.cos(angles), c + r * np.sin(angles)], axis=1)
        verts += rng.normal(0, size * 0.02, size=verts.shape)
        ring = np.vstack([verts, verts[:1]])
        pts = []
        for a, b in zip(ring[:-1], ring[1:]):
            for t in np.linspace(0, 1, 7, endpoint=False):
                p = a + t * (b - a) + rng.normal(0, size * 0.008, size=2)
                pts.append(p)
        pts.append(ring[-1])
        _draw_polyline(draw, np.array(pts), width)
    elif category == "square":
        half = rng.uniform(0.26, 0.4) * size
        corners = np.array(
            [[c - half, c - half], [c + half, c - half], [c + half, c + half], [c - half, c + half]]
        )
        corners += rng.normal(0, size * 0.02, size=corners.shape)
        _draw_polyline(draw, np.vstack([corners, corners[:1]]), width)
    elif category == "stripes":
        rows = rng.integers(3, 5)
        for i in range(rows):
            y = size * (0.25 + 0.5 * i / max(rows - 1, 1)) + rng.normal(0, 1.5)
            xs = np.linspace(size * 0.12, size * 0.88, 12)
            ys = y + rng.normal(0, size * 0.02, size=xs.shape)
            _draw_polyline(draw, np.stack([xs, ys], axis=1), max(width, 2))
    elif category == "dots":
        for _ in range(int(rng.integers(1, 3))):
            cx = c + rng.normal(0, size * 0.08)
            cy = c + rng.normal(0, size * 0.08)
            ring = _wobbly_ring(rng, 0.0, rng.uniform(0.18, 0.3) * size, n=20, squash=0.55)
            ring += np.array([cx, cy])
            _draw_polyline(draw, ring, max(width, 2))
    else:
        raise InputError(f"no sketch synthesizer for category {category!r}")
    return from_uint8(np.asarray(img))


def make_toy_sketch_pool(config: ToyConfig, bank: GaborBank | None = None) -> SketchPool:
    """Synthesize the per-category sketch pool with an 80/20 train/test split."""
    pool = SketchPool(bank=bank or GaborBank())
    specs = [(c, config.pool_per_foreground) for c in config.foreground_categories]
    specs += [(c, config.pool_per_background) for c in config.background_categories]
    for category, count in specs:
        n_train = max(int(round(count * 0.8)), 1)
        for i in range(count):
            rng = np.random.default_rng([config.seed, 757, _stable_hash(category), i])
            pixels = _synth_sketch(category, config.object_size, rng)
            split = "train" if i < n_train else "test"
            pool.add(f"{category}/{i:04d}", category, split, pixels)
    return pool


def _stable_hash(text: str) -> int:
    value = 0
    for ch in text:
        value = (value * 131 + ord(ch)) % (2**31)
    return value
