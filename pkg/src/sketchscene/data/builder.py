"""Dataset synthesis: edge extraction, sketch retrieval, compositing, five-tuple emission.

Output layout (all images 8-bit PNG, [-1, 1] mapped linearly):

    root/
      manifest.json
      objects/<split>/<category>/<record>/   image, sketch, edge_xdog, edge_standard .png + meta.json
      background_pairs/<split>/<scene>/      sketch.png, image.png
      composites/<split>/<scene>/            canvas.png, background_sketch.png, scene.png
      scenes/<split>/<scene>/                image.png, sketch.png
      segmentation/<split>/<scene>/          annotations.json, regions.png, masks/inst*.png
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataError
from ..images import NO_EDGE, quantize, resize, write_png
from .edges import extract_edges
from .placement import composite_background
from .records import InstanceAnnotation, SourceScene
from .retrieval import SketchPool, retrieve_sketch

EDGE_STYLES = ("xdog", "standard")
KINDS = ("objects", "background_pairs", "composites", "scenes", "segmentation")


@dataclass(frozen=True)
class BuildConfig:
    foreground_categories: tuple[str, ...]
    background_categories: tuple[str, ...]
    scene_size: int = 128
    object_size: int = 64
    train_fraction: float = 0.8
    density_area: int = 1024
    placement_size_range: tuple[int, int] = (24, 40)
    occlusion_threshold: float = 0.3  # skip instances overlapped/cut more than this
    min_bbox_area: int = 16
    neutral_fill: float = 0.0
    seed: int = 0


def _ink_blend(canvas: np.ndarray, patch: np.ndarray, bbox) -> None:
    """Darkest-ink compositing of a sketch patch resized into bbox."""
    x1, y1, x2, y2 = bbox
    resized = resize(patch, y2 - y1, x2 - x1)
    region = canvas[y1:y2, x1:x2]
    np.minimum(region, resized, out=region)


def _paste_patch(canvas: np.ndarray, patch: np.ndarray, bbox) -> None:
    x1, y1, x2, y2 = bbox
    canvas[y1:y2, x1:x2] = resize(patch, y2 - y1, x2 - x1)


def _assign_splits(n: int, train_fraction: float, seed: int) -> list[str]:
    order = np.random.default_rng([seed, 11]).permutation(n)
    n_train = int(round(n * train_fraction))
    splits = ["test"] * n
    for idx in order[:n_train]:
        splits[int(idx)] = "train"
    return splits


def _keep_instance(
    inst: InstanceAnnotation,
    others: list[InstanceAnnotation],
    config: BuildConfig,
) -> bool:
    if inst.bbox_area() < config.min_bbox_area:
        return False
    area = int(inst.mask.sum())
    if area == 0:
        return False
    occluders = np.zeros_like(inst.mask)
    for other in others:
        if other is not inst:
            occluders |= other.mask
    overlapped = int((inst.mask & occluders).sum())
    return overlapped <= config.occlusion_threshold * area


def build_dataset(
    source: list[SourceScene],
    pool: SketchPool,
    config: BuildConfig,
    out_root: str | Path,
) -> dict:
    """Synthesize the dataset under ``out_root``; returns the manifest dict.

    Deterministic: rebuilding with the same source, pool, and config yields
    byte-identical files.  Each scene draws from its own sub-seed, so the
    per-scene work could be parallelized without changing the output.
    """
    out_root = Path(out_root)
    fg_set = set(config.foreground_categories)
    bg_set = set(config.background_categories)

    offenders = sorted(
        {
            inst.category
            for scene in source
            for inst in scene.instances
            if inst.category not in fg_set
        }
        | {
            cat
            for scene in source
            for cat in scene.background_regions
            if cat not in bg_set
        }
    )
    if offenders:
        raise DataError(f"source references unknown categories: {offenders}")

    splits = _assign_splits(len(source), config.train_fraction, config.seed)
    counts: dict[str, dict] = {
        "objects": {"train": {}, "test": {}},
        "background_pairs": {"train": 0, "test": 0},
        "composites": {"train": 0, "test": 0},
        "scenes": {"train": 0, "test": 0},
        "segmentation": {"train": 0, "test": 0},
    }
    object_records: dict[str, list[str]] = {"train": [], "test": []}
    scene_records: dict[str, list[str]] = {"train": [], "test": []}
    sketch_ids_used: dict[str, set[str]] = {"train": set(), "test": set()}

    for idx, scene in enumerate(source):
        split = splits[idx]
        scene_id = f"scene{idx:05d}"
        scene_rng = np.random.default_rng([config.seed, 733, idx])
        size = config.scene_size
        image = quantize(scene.image)

        kept = [
            inst
            for inst in scene.instances
            if _keep_instance(inst, scene.instances, config)
        ]

        # object triplets + the per-instance sketches reused by the scene sketch
        instance_sketches: list[tuple[InstanceAnnotation, np.ndarray]] = []
        for k, inst in enumerate(kept):
            x1, y1, x2, y2 = inst.bbox
            crop = quantize(resize(image[y1:y2, x1:x2], config.object_size, config.object_size))
            edge_maps = {
                style: quantize(extract_edges(crop, style=style)) for style in EDGE_STYLES
            }
            picked, distance = retrieve_sketch(crop, inst.category, pool, split)
            instance_sketches.append((inst, picked.pixels))
            sketch_ids_used[split].add(picked.sketch_id)

            rec_name = f"{scene_id}_{k}"
            rec_dir = out_root / "objects" / split / inst.category / rec_name
            rec_dir.mkdir(parents=True, exist_ok=True)
            write_png(rec_dir / "image.png", crop)
            write_png(rec_dir / "sketch.png", picked.pixels)
            for style, edge in edge_maps.items():
                write_png(rec_dir / f"edge_{style}.png", edge)
            (rec_dir / "meta.json").write_text(
                json.dumps(
                    {
                        "category": inst.category,
                        "scene_id": scene_id,
                        "sketch_id": picked.sketch_id,
                        "retrieval_distance": distance,
                    },
                    sort_keys=True,
                )
            )
            counts["objects"][split][inst.category] = (
                counts["objects"][split].get(inst.category, 0) + 1
            )
            object_records[split].append(f"{inst.category}/{rec_name}")

        # background sketch canvas from random placements inside region masks
        placements = composite_background(
            scene.background_regions,
            pool,
            scene_rng,
            split=split,
            density_area=config.density_area,
            size_range=config.placement_size_range,
        )
        bg_sketch = np.full((size, size), NO_EDGE, dtype=np.float32)
        for pixels, bbox, _category, sketch_id in placements:
            _ink_blend(bg_sketch, pixels, bbox)
            sketch_ids_used[split].add(sketch_id)
        bg_sketch = quantize(bg_sketch)

        # scene sketch = background sketches + instance sketches at their boxes
        scene_sketch = bg_sketch.copy()
        for inst, sketch in instance_sketches:
            _ink_blend(scene_sketch, sketch, inst.bbox)
        scene_sketch = quantize(scene_sketch)

        # composite canvas: real foreground crops on neutral fill
        canvas = np.full((size, size, 3), config.neutral_fill, dtype=np.float32)
        for inst, _sketch in instance_sketches:
            x1, y1, x2, y2 = inst.bbox
            canvas[y1:y2, x1:x2] = image[y1:y2, x1:x2]
        canvas = quantize(canvas)

        pair_dir = out_root / "background_pairs" / split / scene_id
        pair_dir.mkdir(parents=True, exist_ok=True)
        write_png(pair_dir / "sketch.png", bg_sketch)
        write_png(pair_dir / "image.png", image)
        counts["background_pairs"][split] += 1

        comp_dir = out_root / "composites" / split / scene_id
        comp_dir.mkdir(parents=True, exist_ok=True)
        write_png(comp_dir / "canvas.png", canvas)
        write_png(comp_dir / "background_sketch.png", bg_sketch)
        write_png(comp_dir / "scene.png", image)
        counts["composites"][split] += 1

        scene_dir = out_root / "scenes" / split / scene_id
        scene_dir.mkdir(parents=True, exist_ok=True)
        write_png(scene_dir / "image.png", image)
        write_png(scene_dir / "sketch.png", scene_sketch)
        counts["scenes"][split] += 1

        seg_dir = out_root / "segmentation" / split / scene_id
        (seg_dir / "masks").mkdir(parents=True, exist_ok=True)
        regions = np.zeros((size, size), dtype=np.uint8)
        region_palette = {}
        for ci, cat in enumerate(sorted(scene.background_regions)):
            value = ci + 1
            region_palette[cat] = value
            regions[scene.background_regions[cat]] = value
        Image.fromarray(regions, mode="L").save(seg_dir / "regions.png")
        ann_entries = []
        for k, inst in enumerate(kept):
            mask_rel = f"masks/inst{k}.png"
            Image.fromarray((inst.mask * 255).astype(np.uint8), mode="L").save(
                seg_dir / mask_rel
            )
            ann_entries.append(
                {"category": inst.category, "bbox": list(inst.bbox), "mask": mask_rel}
            )
        (seg_dir / "annotations.json").write_text(
            json.dumps(
                {
                    "scene_id": scene_id,
                    "split": split,
                    "instances": ann_entries,
                    "region_palette": region_palette,
                },
                sort_keys=True,
                indent=2,
            )
        )
        counts["segmentation"][split] += 1
        scene_records[split].append(scene_id)

    shared = sketch_ids_used["train"] & sketch_ids_used["test"]
    if shared:
        raise DataError(f"split purity violated; shared sketch ids: {sorted(shared)[:5]}")

    manifest = {
        "format_version": 1,
        "seed": config.seed,
        "config": asdict(config),
        "categories": {
            "foreground": list(config.foreground_categories),
            "background": list(config.background_categories),
        },
        "counts": counts,
        "records": {"objects": object_records, "scenes": scene_records},
        "sketch_ids": {
            "train": sorted(sketch_ids_used["train"]),
            "test": sorted(sketch_ids_used["test"]),
        },
    }
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2))
    return manifest
