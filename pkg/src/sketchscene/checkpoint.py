"""Single-file checkpoint archives.

A checkpoint is one ``.npz`` file holding named float arrays (model
parameters) plus a JSON config blob stored as a uint8 array, so it can be
read back without pickle.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import StateError

_CONFIG_KEY = "__config_json__"
_META_KEY = "__meta_json__"


def save_checkpoint(
    path: str | Path,
    arrays: dict[str, np.ndarray],
    config: dict,
    meta: dict | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload: dict[str, np.ndarray] = {}
    for name, arr in arrays.items():
        if name in (_CONFIG_KEY, _META_KEY):
            raise ValueError(f"array name {name!r} is reserved")
        payload[name] = np.asarray(arr)
    payload[_CONFIG_KEY] = _encode_json(config)
    payload[_META_KEY] = _encode_json(meta or {})
    with open(path, "wb") as fh:
        np.savez(fh, **payload)
    return path


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], dict, dict]:
    """Returns (arrays, config, meta).  Missing file raises StateError."""
    path = Path(path)
    if not path.exists():
        raise StateError(f"checkpoint not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            arrays = {
                k: data[k] for k in data.files if k not in (_CONFIG_KEY, _META_KEY)
            }
            config = _decode_json(data[_CONFIG_KEY]) if _CONFIG_KEY in data.files else {}
            meta = _decode_json(data[_META_KEY]) if _META_KEY in data.files else {}
    except (OSError, ValueError) as exc:
        raise StateError(f"checkpoint unreadable: {path}: {exc}") from exc
    return arrays, config, meta


def _encode_json(obj: dict) -> np.ndarray:
    raw = json.dumps(obj, sort_keys=True).encode("utf-8")
    return np.frombuffer(raw, dtype=np.uint8).copy()


def _decode_json(arr: np.ndarray) -> dict:
    return json.loads(bytes(arr.tobytes()).decode("utf-8"))
