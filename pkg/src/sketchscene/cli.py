"""Command-line entry point.

Subcommands: build-data, train-object, train-background, generate-object,
generate-scene, evaluate, ablate, serve.  Options resolve as
flags > --config file (JSON) > built-in defaults; every output directory
receives a run_record.json with the resolved config, seed, and version.
Exit codes: 0 ok, 1 module error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .background.train import BackgroundConfig, train_background
from .data import (
    BuildConfig,
    SketchPool,
    ToyConfig,
    build_dataset,
    load_split,
    make_toy_sketch_pool,
    make_toy_source,
    read_source_directory,
)
from .errors import InputError, SketchSceneError
from .images import read_png, write_png
from .metrics.report import evaluate, render_table
from .object_gan.inference import infer_object
from .object_gan.model import ObjectModelBundle, TrainConfig
from .object_gan.train import train_object_model
from .scene.pipeline import generate_scene
from .scene.segment import SceneSketch, Stroke, scene_sketch_from_strokes, segment_scene

ABLATION_TOKENS = {
    "DJ": ("use_joint_critic", "W/O D_J"),
    "DE": ("use_edge_critic", "W/O D_E"),
    "DI": ("use_image_critic", "W/O D_I"),
    "AC": ("use_classifier", "W/O AC"),
}


def _write_run_record(out_dir: Path, command: str, config: dict, seed: int) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    record = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
    }
    (out_dir / "run_record.json").write_text(json.dumps(record, indent=2, sort_keys=True))


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """flags > config file > defaults, for every key in ``defaults``."""
    file_config = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise InputError(f"config file not found: {path}")
        file_config = json.loads(path.read_text())
    resolved = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in file_config:
            resolved[key] = file_config[key]
        else:
            resolved[key] = default
    return resolved


def _require(value, what: str):
    if value is None:
        raise InputError(f"missing required option: {what}")
    return value


def _cmd_build_data(args) -> str:
    cfg = _merge(
        args,
        {
            "source": "toy",
            "out": None,
            "seed": 0,
            "scenes": 60,
            "scene_size": 128,
            "object_size": 64,
            "sketch_pool": None,
            "foreground": None,
            "background": None,
        },
    )
    out = Path(_require(cfg["out"], "--out"))
    seed = int(cfg["seed"])
    if cfg["source"] == "toy":
        toy = ToyConfig(
            num_scenes=int(cfg["scenes"]),
            scene_size=int(cfg["scene_size"]),
            object_size=int(cfg["object_size"]),
            seed=seed,
        )
        source = make_toy_source(toy)
        pool = make_toy_sketch_pool(toy)
        foreground = list(toy.foreground_categories)
        background = list(toy.background_categories)
    else:
        source = read_source_directory(cfg["source"])
        pool = SketchPool.from_directory(_require(cfg["sketch_pool"], "--sketch-pool"))
        foreground = _require(cfg["foreground"], "--foreground").split(",")
        background = _require(cfg["background"], "--background").split(",")
    build_config = BuildConfig(
        foreground_categories=tuple(foreground),
        background_categories=tuple(background),
        scene_size=int(cfg["scene_size"]),
        object_size=int(cfg["object_size"]),
        seed=seed,
    )
    manifest = build_dataset(source, pool, build_config, out)
    _write_run_record(out, "build-data", cfg, seed)
    counts = manifest["counts"]["scenes"]
    return f"built dataset at {out} ({counts['train']} train / {counts['test']} test scenes)"


def _train_config_from(cfg: dict, num_categories: int) -> TrainConfig:
    return TrainConfig(
        num_categories=num_categories,
        noise_dim=int(cfg["noise_dim"]),
        resolution=int(cfg["resolution"]),
        base_width=int(cfg["base_width"]),
        optimizer_kind=cfg["optimizer"],
        learning_rate=float(cfg["learning_rate"]),
        epochs=int(cfg["epochs"]),
        batch_size=int(cfg["batch_size"]),
        checkpoint_interval=int(cfg["checkpoint_interval"]),
        use_joint_critic=cfg["use_joint_critic"],
        use_edge_critic=cfg["use_edge_critic"],
        use_image_critic=cfg["use_image_critic"],
        use_classifier=cfg["use_classifier"],
        seed=int(cfg["seed"]),
    )


_TRAIN_OBJECT_DEFAULTS = {
    "data": None,
    "out": None,
    "noise_dim": 128,
    "resolution": 64,
    "base_width": 64,
    "optimizer": "rmsprop-wgangp",
    "learning_rate": 2e-4,
    "epochs": 30,
    "batch_size": 64,
    "checkpoint_interval": 10,
    "seed": 0,
    "use_joint_critic": True,
    "use_edge_critic": True,
    "use_image_critic": True,
    "use_classifier": True,
}


def _run_object_training(cfg: dict, command: str, label: str | None = None) -> str:
    data_root = _require(cfg["data"], "--data")
    out = Path(_require(cfg["out"], "--out"))
    dataset = load_split(data_root, "object", "train")
    config = _train_config_from(cfg, len(dataset.categories))
    result = train_object_model(dataset, config, out)
    record = dict(cfg)
    record["train_config"] = config.to_dict()
    if label:
        record["ablation_label"] = label
    _write_run_record(out, command, record, config.seed)
    tag = f" [{label}]" if label else ""
    return (
        f"trained object model{tag}: {len(result.checkpoints)} checkpoints under {out}, "
        f"final checkpoint {result.checkpoints[-1].name}"
    )


def _cmd_train_object(args) -> str:
    return _run_object_training(_merge(args, _TRAIN_OBJECT_DEFAULTS), "train-object")


def _cmd_ablate(args) -> str:
    cfg = _merge(args, {**_TRAIN_OBJECT_DEFAULTS, "drop": None})
    drops = _require(cfg["drop"], "--drop")
    if isinstance(drops, str):
        drops = [drops]
    labels = []
    for token in drops:
        if token not in ABLATION_TOKENS:
            raise InputError(f"unknown ablation token {token!r}; valid: {sorted(ABLATION_TOKENS)}")
        flag, label = ABLATION_TOKENS[token]
        cfg[flag] = False
        labels.append(label)
    label = ", ".join(labels)
    out = Path(_require(cfg["out"], "--out")) / ("wo_" + "_".join(drops))
    cfg = {**cfg, "out": str(out)}
    return _run_object_training(cfg, "ablate", label)


def _cmd_train_background(args) -> str:
    cfg = _merge(
        args,
        {
            "data": None,
            "out": None,
            "resolution": 128,
            "base_width": 64,
            "learning_rate": 2e-4,
            "l1_weight": 100.0,
            "epochs": 40,
            "batch_size": 16,
            "checkpoint_interval": 10,
            "seed": 0,
        },
    )
    data_root = _require(cfg["data"], "--data")
    out = Path(_require(cfg["out"], "--out"))
    pairs = load_split(data_root, "background_pair", "train")
    config = BackgroundConfig(
        resolution=int(cfg["resolution"]),
        base_width=int(cfg["base_width"]),
        learning_rate=float(cfg["learning_rate"]),
        l1_weight=float(cfg["l1_weight"]),
        epochs=int(cfg["epochs"]),
        batch_size=int(cfg["batch_size"]),
        checkpoint_interval=int(cfg["checkpoint_interval"]),
        seed=int(cfg["seed"]),
    )
    result = train_background(pairs, config, out)
    record = dict(cfg)
    record["background_config"] = asdict(config)
    _write_run_record(out, "train-background", record, config.seed)
    return (
        f"trained background model: {len(result.checkpoints)} checkpoints under {out}, "
        f"final {result.checkpoints[-1].name}"
    )


def _cmd_generate_object(args) -> str:
    cfg = _merge(
        args, {"checkpoint": None, "sketch": None, "category": None, "out": None, "seed": 0}
    )
    bundle, _ = ObjectModelBundle.load(_require(cfg["checkpoint"], "--checkpoint"))
    sketch = read_png(_require(cfg["sketch"], "--sketch"), channels=1)
    category = _require(cfg["category"], "--category")
    if category not in bundle.categories:
        raise InputError(f"unknown category {category!r}; valid: {bundle.categories}")
    from .images import resize

    r = bundle.config.resolution
    if sketch.shape != (r, r):
        sketch = resize(sketch, r, r)
    image = infer_object(bundle, sketch, bundle.categories.index(category))
    out = Path(_require(cfg["out"], "--out"))
    out.parent.mkdir(parents=True, exist_ok=True)
    write_png(out, image)
    _write_run_record(out.parent, "generate-object", cfg, int(cfg["seed"]))
    return f"wrote {out}"


def _cmd_generate_scene(args) -> str:
    cfg = _merge(
        args,
        {
            "object_checkpoint": None,
            "background_checkpoint": None,
            "strokes": None,
            "dataset": None,
            "split": "test",
            "index": 0,
            "out": None,
            "seed": 0,
        },
    )
    from .background.inference import BackgroundModel

    bundle, _ = ObjectModelBundle.load(_require(cfg["object_checkpoint"], "--object-checkpoint"))
    background_model, _ = BackgroundModel.load(
        _require(cfg["background_checkpoint"], "--background-checkpoint")
    )
    out = Path(_require(cfg["out"], "--out"))
    seed = int(cfg["seed"])

    if cfg["strokes"]:
        payload = json.loads(Path(cfg["strokes"]).read_text())
        strokes = [
            Stroke(points=np.asarray(s["points"], dtype=np.float32), category=s["category"])
            for s in payload["strokes"]
        ]
        size = int(payload.get("canvas_size", background_model.config.resolution))
        sketch = scene_sketch_from_strokes(strokes, size)
        seg = segment_scene(
            sketch,
            "labeled_strokes",
            bundle.categories,
            payload.get("background_categories", []),
        )
    else:
        dataset = load_split(_require(cfg["dataset"], "--dataset or --strokes"), "scene", cfg["split"])
        record = dataset.load(int(cfg["index"]))
        sketch = SceneSketch(canvas=record["sketch"])
        from .scene.segment import SegmentationResult

        seg = SegmentationResult(foreground=list(record["instances"]), background=[])

    result = generate_scene(sketch, seg, bundle, background_model, np.random.default_rng(seed))
    out.mkdir(parents=True, exist_ok=True)
    write_png(out / "final.png", result.final_image)
    write_png(out / "foreground_canvas.png", result.foreground_canvas)
    write_png(out / "background_sketch.png", result.background_sketch)
    for i, patch in enumerate(result.patches):
        write_png(out / f"patch_{i}_{patch.category}.png", patch.patch)
    _write_run_record(out, "generate-scene", cfg, seed)
    return f"wrote scene artifacts to {out} ({len(result.patches)} instances)"


def _cmd_evaluate(args) -> str:
    cfg = _merge(
        args,
        {
            "dataset": None,
            "object_checkpoint": None,
            "background_checkpoint": None,
            "split": "test",
            "seed": 0,
            "out": None,
            "max_objects": None,
            "max_scenes": None,
        },
    )
    report = evaluate(
        _require(cfg["object_checkpoint"], "--object-checkpoint"),
        _require(cfg["background_checkpoint"], "--background-checkpoint"),
        _require(cfg["dataset"], "--dataset"),
        split=cfg["split"],
        seed=int(cfg["seed"]),
        max_objects=cfg["max_objects"],
        max_scenes=cfg["max_scenes"],
    )
    table = render_table(report)
    print(table)
    if cfg["out"]:
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json())
        (out / "report.txt").write_text(table + "\n")
        _write_run_record(out, "evaluate", cfg, int(cfg["seed"]))
    return f"evaluated split {report.split}: counts={report.counts}"


def _cmd_serve(args) -> str:
    cfg = _merge(
        args,
        {
            "object_checkpoint": None,
            "background_checkpoint": None,
            "dataset": None,
            "background_categories": None,
            "host": "127.0.0.1",
            "port": 8000,
            "max_in_flight": 4,
        },
    )
    from .service import create_app

    background_categories = []
    if cfg["background_categories"]:
        background_categories = str(cfg["background_categories"]).split(",")
    elif cfg["dataset"]:
        manifest = json.loads((Path(cfg["dataset"]) / "manifest.json").read_text())
        background_categories = manifest["categories"]["background"]
    app = create_app(
        object_checkpoint=_require(cfg["object_checkpoint"], "--object-checkpoint"),
        background_checkpoint=_require(cfg["background_checkpoint"], "--background-checkpoint"),
        background_categories=background_categories,
        max_in_flight=int(cfg["max_in_flight"]),
    )
    import uvicorn

    uvicorn.run(app, host=cfg["host"], port=int(cfg["port"]))
    return "server stopped"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketchscene", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, flags):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with option defaults")
        for flag, kwargs in flags.items():
            p.add_argument(flag, **kwargs)
        p.set_defaults(fn=fn)
        return p

    add(
        "build-data",
        _cmd_build_data,
        {
            "--source": {"help": "'toy' or a source directory"},
            "--out": {},
            "--seed": {"type": int},
            "--scenes": {"type": int},
            "--scene-size": {"type": int, "dest": "scene_size"},
            "--object-size": {"type": int, "dest": "object_size"},
            "--sketch-pool": {"dest": "sketch_pool"},
            "--foreground": {},
            "--background": {},
        },
    )

    train_flags = {
        "--data": {},
        "--out": {},
        "--noise-dim": {"type": int, "dest": "noise_dim"},
        "--resolution": {"type": int},
        "--base-width": {"type": int, "dest": "base_width"},
        "--optimizer": {"choices": ["rmsprop-wgangp", "rmsprop-wgan", "adam-dcgan"]},
        "--learning-rate": {"type": float, "dest": "learning_rate"},
        "--epochs": {"type": int},
        "--batch-size": {"type": int, "dest": "batch_size"},
        "--checkpoint-interval": {"type": int, "dest": "checkpoint_interval"},
        "--seed": {"type": int},
    }
    add("train-object", _cmd_train_object, train_flags)
    ablate = add("ablate", _cmd_ablate, train_flags)
    ablate.add_argument(
        "--drop",
        action="append",
        choices=sorted(ABLATION_TOKENS),
        help="adversary/classifier to remove (repeatable)",
    )

    add(
        "train-background",
        _cmd_train_background,
        {
            "--data": {},
            "--out": {},
            "--resolution": {"type": int},
            "--base-width": {"type": int, "dest": "base_width"},
            "--learning-rate": {"type": float, "dest": "learning_rate"},
            "--l1-weight": {"type": float, "dest": "l1_weight"},
            "--epochs": {"type": int},
            "--batch-size": {"type": int, "dest": "batch_size"},
            "--checkpoint-interval": {"type": int, "dest": "checkpoint_interval"},
            "--seed": {"type": int},
        },
    )
    add(
        "generate-object",
        _cmd_generate_object,
        {
            "--checkpoint": {},
            "--sketch": {},
            "--category": {},
            "--out": {},
            "--seed": {"type": int},
        },
    )
    add(
        "generate-scene",
        _cmd_generate_scene,
        {
            "--object-checkpoint": {"dest": "object_checkpoint"},
            "--background-checkpoint": {"dest": "background_checkpoint"},
            "--strokes": {"help": "JSON stroke file (labeled_strokes mode)"},
            "--dataset": {"help": "built dataset root (oracle mode)"},
            "--split": {},
            "--index": {"type": int},
            "--out": {},
            "--seed": {"type": int},
        },
    )
    add(
        "evaluate",
        _cmd_evaluate,
        {
            "--dataset": {},
            "--object-checkpoint": {"dest": "object_checkpoint"},
            "--background-checkpoint": {"dest": "background_checkpoint"},
            "--split": {},
            "--seed": {"type": int},
            "--out": {},
            "--max-objects": {"type": int, "dest": "max_objects"},
            "--max-scenes": {"type": int, "dest": "max_scenes"},
        },
    )
    add(
        "serve",
        _cmd_serve,
        {
            "--object-checkpoint": {"dest": "object_checkpoint"},
            "--background-checkpoint": {"dest": "background_checkpoint"},
            "--dataset": {},
            "--background-categories": {"dest": "background_categories"},
            "--host": {},
            "--port": {"type": int},
            "--max-in-flight": {"type": int, "dest": "max_in_flight"},
        },
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = args.fn(args)
    except SketchSceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
